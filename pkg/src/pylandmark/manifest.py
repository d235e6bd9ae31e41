"""Per-stage run manifests

Every stage directory gets a ``manifest.json`` listing the config hash,
component versions and SHA-256 of every input and output file. Downstream
stages verify the upstream manifest against the files on disk before
consuming them.
"""

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy
import soundfile

from pylandmark.common import __version__, DataError, StaleInputError

# Use package-level logger
logger = logging.getLogger("pylandmark")

MANIFEST_NAME = "manifest.json"


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def component_versions() -> dict[str, str]:
    return {"pylandmark": __version__, "numpy": np.__version__, "scipy": scipy.__version__, "soundfile": soundfile.__version__}


def _created() -> str:
    """SOURCE_DATE_EPOCH as UTC; empty when unset so reruns write identical manifests"""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if not epoch:
        return ""
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(int(epoch)))


@dataclass
class RunManifest:
    stage: str
    config_hash: str
    inputs: dict[str, str] = field(default_factory=dict)  # path -> sha256
    outputs: dict[str, str] = field(default_factory=dict)  # path relative to the manifest dir -> sha256
    versions: dict[str, str] = field(default_factory=component_versions)
    parameters: dict = field(default_factory=dict)
    created: str = field(default_factory=_created)

    def add_inputs(self, paths) -> None:
        for path in sorted(Path(p) for p in paths):
            self.inputs[path.as_posix()] = sha256_file(path)

    def add_outputs(self, directory: Path, paths) -> None:
        for path in sorted(Path(p) for p in paths):
            self.outputs[path.relative_to(directory).as_posix()] = sha256_file(path)

    def to_dict(self, with_timestamp: bool = True) -> dict:
        data = {
            "stage": self.stage,
            "config_hash": self.config_hash,
            "versions": self.versions,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "outputs": self.outputs,
        }
        if with_timestamp and self.created:
            data["created"] = self.created
        return data

    def write(self, directory: str | Path) -> Path:
        path = Path(directory) / MANIFEST_NAME
        path.write_text(json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, directory: str | Path) -> "RunManifest":
        path = Path(directory) / MANIFEST_NAME
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise DataError(f"no {MANIFEST_NAME} in {directory}; run the upstream stage first") from None
        except json.JSONDecodeError as e:
            raise DataError(f"{path}: {e}") from e
        return cls(data["stage"], data["config_hash"], data["inputs"], data["outputs"], data["versions"], data.get("parameters", {}), data.get("created", ""))

    def stale_outputs(self, directory: str | Path) -> list[str]:
        """Recorded outputs that are missing or changed on disk"""
        directory = Path(directory)
        stale = []
        for rel, digest in sorted(self.outputs.items()):
            path = directory / rel
            if not path.is_file() or sha256_file(path) != digest:
                stale.append(rel)
        return stale


def check_upstream(directory: str | Path, force: bool = False) -> RunManifest:
    """Load an upstream manifest and verify its outputs; StaleInputError unless force"""
    manifest = RunManifest.load(directory)
    stale = manifest.stale_outputs(directory)
    if stale:
        listing = ", ".join(stale[:5]) + (" ..." if len(stale) > 5 else "")
        message = f"{directory}: {len(stale)} {manifest.stage} output(s) changed since the manifest was written: {listing}"
        if not force:
            raise StaleInputError(message + " (rerun the stage or pass --force)")
        logger.warning(message + " (continuing, --force)")
    return manifest
