import logging
from .common import (
    __version__,
    PyLandmarkError,
    ConfigError,
    DataError,
    NumericError,
    VariantMismatchError,
    DimensionError,
    StaleInputError,
)
from .config import PipelineConfig
from .corpus import Corpus, PhoneClassMap, Voicing, Landmark, LandmarkType, SynthSpec, synthesize_corpus
from .features import FeatureVariant, FeatureTable, extract_utterance_features
from .models import ModelFamily, ModelArtifact, train, load_model, save_model
from .evaluation import EvalReport, CrossLingualReport, cross_lingual_report
from .pipeline import Pipeline

# Create single logger for entire library
# Users can configure it with: logging.getLogger('pylandmark').setLevel(logging.DEBUG)
logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())  # No output by default unless user configures

__all__ = [
    "__version__",
    "PyLandmarkError",
    "ConfigError",
    "DataError",
    "NumericError",
    "VariantMismatchError",
    "DimensionError",
    "StaleInputError",
    "PipelineConfig",
    "Corpus",
    "PhoneClassMap",
    "Voicing",
    "Landmark",
    "LandmarkType",
    "SynthSpec",
    "synthesize_corpus",
    "FeatureVariant",
    "FeatureTable",
    "extract_utterance_features",
    "ModelFamily",
    "ModelArtifact",
    "train",
    "load_model",
    "save_model",
    "EvalReport",
    "CrossLingualReport",
    "cross_lingual_report",
    "Pipeline",
    "logger",  # Export logger for users who want to configure it
]
