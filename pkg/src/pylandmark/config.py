"""Pipeline configuration

A sectioned INI file (``[run] [corpus] [features] [dsp] [model] [train] [evaluate]``)
read with configparser. Values arrive as strings and are converted by the
declared option type; an empty value keeps the default. Command-line flags are
applied on top of the file afterwards.
"""

import configparser
import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

from pylandmark.common import ConfigError
from pylandmark.corpus.phones import PhoneClassMap
from pylandmark.dsp.mfcc import MfccConfig
from pylandmark.dsp.pitch import PitchConfig
from pylandmark.features.cues import CueConfig
from pylandmark.features.extraction import FeatureSettings
from pylandmark.features.variants import FeatureVariant
from pylandmark.models.artifact import ModelFamily
from pylandmark.models.training import TrainConfig

# Use package-level logger
logger = logging.getLogger("pylandmark")


def to_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: '{value}'")


def to_list(value: str) -> list[str]:
    return [item for item in (v.strip() for v in value.replace("\n", ",").split(",")) if item]


# (section, key) -> (attribute, converter)
OPTIONS: dict[tuple[str, str], tuple[str, Any]] = {
    ("run", "out"): ("out", Path),
    ("run", "seed"): ("seed", int),
    ("run", "jobs"): ("jobs", int),
    ("run", "force"): ("force", to_bool),
    ("run", "verbose"): ("verbose", to_bool),
    ("corpus", "roots"): ("corpora", to_list),
    ("corpus", "alignment_dir"): ("alignment_dir", Path),
    ("corpus", "audio_dir"): ("audio_dir", Path),
    ("corpus", "phone_map"): ("phone_map_path", Path),
    ("corpus", "sample_rate"): ("sample_rate", int),
    ("features", "variant"): ("variant", FeatureVariant.from_name),
    ("features", "include_f2"): ("include_f2", to_bool),
    ("features", "n_fft"): ("n_fft", int),
    ("features", "n_filters"): ("n_filters", int),
    ("features", "n_ceps"): ("n_ceps", int),
    ("features", "pre_emphasis"): ("pre_emphasis", float),
    ("features", "delta_window"): ("delta_window", int),
    ("features", "lifter"): ("lifter", int),
    ("dsp", "f0_min"): ("f0_min", float),
    ("dsp", "f0_max"): ("f0_max", float),
    ("dsp", "switch_penalty"): ("switch_penalty", float),
    ("dsp", "octave_penalty"): ("octave_penalty", float),
    ("dsp", "unvoiced_bias"): ("unvoiced_bias", float),
    ("dsp", "lag_weight"): ("lag_weight", float),
    ("dsp", "candidate_threshold"): ("candidate_threshold", float),
    ("dsp", "octave_ratio"): ("octave_ratio", float),
    ("dsp", "lpc_order"): ("lpc_order", int),
    ("model", "family"): ("family", ModelFamily),
    ("model", "c"): ("svm_c", float),
    ("model", "gamma"): ("svm_gamma", float),
    ("model", "svm_class_weighting"): ("svm_class_weighting", to_bool),
    ("model", "grid_search"): ("grid_search", to_bool),
    ("train", "max_epochs"): ("max_epochs", int),
    ("train", "patience"): ("patience", int),
    ("train", "dev_fraction"): ("dev_fraction", float),
    ("train", "batch_size"): ("batch_size", int),
    ("train", "class_weighting"): ("class_weighting", to_bool),
    ("train", "learning_rate"): ("learning_rate", float),
    ("evaluate", "reference"): ("reference", str),
}


@dataclass
class PipelineConfig:
    out: Path = Path("workspace")
    seed: int = 0
    jobs: int = 1
    force: bool = False
    verbose: bool = False

    corpora: list[str] = field(default_factory=list)
    alignment_dir: Path | None = None
    audio_dir: Path | None = None
    phone_map_path: Path | None = None
    sample_rate: int = 16000

    variant: FeatureVariant = FeatureVariant.CUES
    include_f2: bool = False
    n_fft: int = 1024
    n_filters: int = 40
    n_ceps: int = 13
    pre_emphasis: float = 0.97
    delta_window: int = 2
    lifter: int = 0

    f0_min: float = 50.0
    f0_max: float = 400.0
    switch_penalty: float = 0.2
    octave_penalty: float = 0.35
    unvoiced_bias: float = 0.0
    lag_weight: float = 0.02
    candidate_threshold: float = 0.3
    octave_ratio: float = 0.9
    lpc_order: int = 14

    family: ModelFamily = ModelFamily.SVM
    svm_c: float = 1.0
    svm_gamma: float | None = None
    svm_class_weighting: bool = False
    grid_search: bool = False

    max_epochs: int = 200
    patience: int = 10
    dev_fraction: float = 0.10
    batch_size: int = 32
    class_weighting: bool = True
    learning_rate: float = 1e-3

    reference: str | None = None  # defaults to the training corpus

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        parser = configparser.ConfigParser()
        try:
            if not parser.read(path, encoding="utf-8"):
                raise ConfigError(f"cannot read config file {path}")
        except configparser.Error as e:
            raise ConfigError(f"{path}: {e}") from e
        config = cls()
        for section in parser.sections():
            for key, raw in parser.items(section):
                config.set_option(section, key, raw)
        logger.debug(f"Loaded config {path}")
        return config

    def set_option(self, section: str, key: str, raw: str) -> None:
        """Convert one string value by its declared type; an empty string restores the default"""
        try:
            attr, convert = OPTIONS[(section, key)]
        except KeyError:
            raise ConfigError(f"unknown config option [{section}] {key}") from None
        if raw.strip() == "":
            setattr(self, attr, getattr(type(self)(), attr))
            return
        try:
            setattr(self, attr, convert(raw.strip()))
        except ValueError as e:
            raise ConfigError(f"[{section}] {key} = {raw!r}: {e}") from e

    def override(self, **values: Any) -> "PipelineConfig":
        """Copy with the non-None values applied (command-line flags)"""
        return replace(self, **{k: v for k, v in values.items() if v is not None})

    def validate(self) -> None:
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.phone_map_path is not None and not self.phone_map_path.is_file():
            raise ConfigError(f"phone map {self.phone_map_path} does not exist")
        for attr in ("alignment_dir", "audio_dir"):
            path = getattr(self, attr)
            if path is not None and not path.is_dir():
                raise ConfigError(f"{attr} {path} is not a directory")
        try:
            self.feature_settings()
            self.train_config()
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def phone_map(self) -> PhoneClassMap:
        return PhoneClassMap.load(self.phone_map_path) if self.phone_map_path else PhoneClassMap.default()

    def pitch_config(self) -> PitchConfig:
        return PitchConfig(
            f0_min=self.f0_min,
            f0_max=self.f0_max,
            switch_penalty=self.switch_penalty,
            octave_penalty=self.octave_penalty,
            unvoiced_bias=self.unvoiced_bias,
            lag_weight=self.lag_weight,
            candidate_threshold=self.candidate_threshold,
            octave_ratio=self.octave_ratio,
            sample_rate=self.sample_rate,
        )

    def feature_settings(self) -> FeatureSettings:
        cues = CueConfig(pitch=self.pitch_config(), n_fft=self.n_fft, lpc_order=self.lpc_order, include_f2=self.include_f2, sample_rate=self.sample_rate)
        mfcc = MfccConfig(
            n_ceps=self.n_ceps,
            pre_emphasis=self.pre_emphasis,
            delta_window=self.delta_window,
            n_fft=self.n_fft,
            n_filters=self.n_filters,
            lifter=self.lifter,
            sample_rate=self.sample_rate,
        )
        return FeatureSettings(cues=cues, mfcc=mfcc, n_fft=self.n_fft, n_filters=self.n_filters)

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            max_epochs=self.max_epochs,
            patience=self.patience,
            dev_fraction=self.dev_fraction,
            batch_size=self.batch_size,
            seed=self.seed,
            class_weighting=self.class_weighting,
            learning_rate=self.learning_rate,
            svm_c=self.svm_c,
            svm_gamma=self.svm_gamma,
            svm_class_weighting=self.svm_class_weighting,
            grid_search=self.grid_search,
        )

    def digest(self, *sections: str) -> str:
        """Hash of the options in the given sections (all when none given); run-control options are excluded"""
        wanted = set(sections) or {s for s, _ in OPTIONS}
        values = {attr: getattr(self, attr) for (section, _), (attr, _) in OPTIONS.items() if section in wanted and section != "run"}
        return hashlib.sha256(json.dumps(values, sort_keys=True, default=str).encode()).hexdigest()

    def to_dict(self) -> dict:
        return json.loads(json.dumps(asdict(self), default=str))
