from .cues import CUE_NAMES, CueConfig, CueVector, manual_cues
from .extraction import FeatureSettings, extract_utterance_features, neighbours
from .spectral import RawInput, mfcc_features, raw_nn_input
from .standardizer import Standardizer, fit_standardizer
from .table import FeatureRow, FeatureTable
from .variants import FeatureVariant

__all__ = [
    "CUE_NAMES",
    "CueConfig",
    "CueVector",
    "manual_cues",
    "FeatureSettings",
    "extract_utterance_features",
    "neighbours",
    "RawInput",
    "mfcc_features",
    "raw_nn_input",
    "Standardizer",
    "fit_standardizer",
    "FeatureRow",
    "FeatureTable",
    "FeatureVariant",
]
