"""Trained-model container and its JSON serialization

Parameters are stored as base64 little-endian float64 blobs, each with a
SHA-256 of its raw bytes, so a load reproduces them bit for bit.
"""

import base64
import binascii
import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from pylandmark.common import ArtifactError, ChecksumError, DimensionError
from pylandmark.features.standardizer import Standardizer
from pylandmark.features.variants import FeatureVariant
from pylandmark.models.network import CnnConfig, Network
from pylandmark.models.svm import SvmModel, svm_predict

FORMAT = "pylandmark-model"
VERSION = 1


@dataclass(frozen=True)
class TrainLogRow:
    epoch: int
    train_loss: float
    dev_loss: float
    dev_f1: float


class ModelFamily(Enum):
    SVM = "svm"
    MLP = "mlp"
    CNN = "cnn"

    def __str__(self) -> str:
        return self.value


@dataclass
class ModelArtifact:
    family: ModelFamily
    variant: FeatureVariant
    standardizer: Standardizer
    model: Any  # SvmModel or Network
    metadata: dict = field(default_factory=dict)
    training_log: list = field(default_factory=list)

    @property
    def input_dim(self) -> int:
        return self.standardizer.dim

    def predict(self, features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(labels 1 = voiced / 0 = unvoiced, scores); SVM scores are margins, network scores probabilities"""
        x = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if x.shape[1] != self.input_dim:
            raise DimensionError(f"{self.family}/{self.variant} model expects {self.input_dim}-dim input, got {x.shape[1]}")
        xs = self.standardizer.apply(x)
        if self.family is ModelFamily.SVM:
            return svm_predict(self.model, xs)
        probs = self.model.predict_proba(xs)
        return (probs >= 0.5).astype(np.int64), probs


def _encode(array: np.ndarray) -> dict:
    raw = np.ascontiguousarray(array, dtype="<f8").tobytes()
    return {"shape": list(np.shape(array)), "data": base64.b64encode(raw).decode("ascii"), "sha256": hashlib.sha256(raw).hexdigest()}


def _decode(name: str, blob: dict) -> np.ndarray:
    try:
        raw = base64.b64decode(blob["data"], validate=True)
    except (binascii.Error, ValueError) as e:
        raise ChecksumError(f"parameter '{name}': undecodable blob ({e})") from e
    if hashlib.sha256(raw).hexdigest() != blob["sha256"]:
        raise ChecksumError(f"parameter '{name}': checksum mismatch")
    shape = tuple(blob["shape"])
    if int(np.prod(shape, dtype=np.int64)) * 8 != len(raw):
        raise ChecksumError(f"parameter '{name}': {len(raw)} bytes do not fill shape {shape}")
    return np.frombuffer(raw, dtype="<f8").reshape(shape).astype(np.float64)


def _model_payload(artifact: ModelArtifact) -> tuple[dict, dict[str, np.ndarray]]:
    if artifact.family is ModelFamily.SVM:
        m: SvmModel = artifact.model
        config = {"bias": m.bias, "gamma": m.gamma, "c": m.c, "iterations": m.iterations}
        return config, {"support_vectors": m.support_vectors, "alphas": m.alphas, "labels": m.labels}
    net: Network = artifact.model
    return net.config.to_dict(), dict(net.parameters())


def save_model(artifact: ModelArtifact, path: str | Path) -> None:
    config, params = _model_payload(artifact)
    document = {
        "format": FORMAT,
        "version": VERSION,
        "family": artifact.family.value,
        "variant": artifact.variant.value,
        "model_config": config,
        "standardizer": {"mean": _encode(artifact.standardizer.mean), "std": _encode(artifact.standardizer.std)},
        "parameters": {name: _encode(array) for name, array in params.items()},
        "metadata": artifact.metadata,
        "training_log": [[r.epoch, r.train_loss, r.dev_loss, r.dev_f1] for r in artifact.training_log],
    }
    Path(path).write_text(json.dumps(document, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> ModelArtifact:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ArtifactError(f"cannot read model artifact {path}: {e}") from e
    if document.get("format") != FORMAT:
        raise ArtifactError(f"{path} is not a {FORMAT} artifact")
    if document.get("version") != VERSION:
        raise ArtifactError(f"{path}: artifact version {document.get('version')} unsupported (expected {VERSION})")

    try:
        family = ModelFamily(document["family"])
        variant = FeatureVariant.from_name(document["variant"])
        standardizer = Standardizer(_decode("mean", document["standardizer"]["mean"]), _decode("std", document["standardizer"]["std"]))
        params = {name: _decode(name, blob) for name, blob in document["parameters"].items()}
        config = document["model_config"]
        if family is ModelFamily.SVM:
            model: Any = SvmModel(params["support_vectors"], params["alphas"], params["labels"], float(config["bias"]), float(config["gamma"]), float(config["c"]), int(config["iterations"]))
        else:
            model = Network.build(CnnConfig.from_dict(config), np.random.default_rng(0))
            model.set_state(params)
        log = [TrainLogRow(int(e), float(a), float(b), float(c)) for e, a, b, c in document.get("training_log", [])]
    except ChecksumError:
        raise
    except (KeyError, ValueError, TypeError) as e:
        raise ArtifactError(f"{path}: malformed artifact ({e})") from e
    return ModelArtifact(family, variant, standardizer, model, document.get("metadata", {}), log)
