from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from pylandmark.corpus.alignment import PhoneSegment
from pylandmark.corpus.regions import LandmarkRegion, slice_padded
from pylandmark.dsp.mel import MelFilterbank, mel_filterbank
from pylandmark.dsp.mfcc import MfccConfig, mfcc_with_deltas
from pylandmark.dsp.spectrum import hamming_window, magnitude_fft
from pylandmark.features.variants import FeatureVariant

LOG_FLOOR = 1e-10


@lru_cache(maxsize=None)
def _filterbank(n_filters: int, n_fft: int, sample_rate: int) -> MelFilterbank:
    return mel_filterbank(n_filters, n_fft, sample_rate)


def mfcc_features(audio: np.ndarray, segment: PhoneSegment, region: LandmarkRegion, variant: FeatureVariant, config: MfccConfig | None = None) -> np.ndarray:
    """Frame-averaged MFCC(13) or MFCC(39) over the landmark region or the whole phone"""
    if not variant.is_mfcc:
        raise ValueError(f"{variant} is not an MFCC variant")
    config = replace(config or MfccConfig(), include_deltas=variant.with_deltas)
    if variant.whole_phone:
        start = int(round(segment.start * config.sample_rate))
        end = int(round(segment.end * config.sample_rate))
        span, _ = slice_padded(audio, start, max(end - start, 1))
    else:
        span = region.samples
    frames = mfcc_with_deltas(span, config, _filterbank(config.n_filters, config.n_fft, config.sample_rate))
    return frames.mean(axis=0)


@dataclass(frozen=True)
class RawInput:
    kind: FeatureVariant
    values: np.ndarray


def raw_nn_input(region: LandmarkRegion, kind: FeatureVariant, n_fft: int = 1024, n_filters: int = 40, epsilon: float = LOG_FLOOR) -> RawInput:
    """Hamming-windowed region -> 513 FFT magnitudes, or 40 log mel energies of those magnitudes"""
    if not kind.is_raw:
        raise ValueError(f"{kind} is not a raw network input")
    spectrum = magnitude_fft(region.samples * hamming_window(len(region.samples)), n_fft, region.sample_rate)
    if kind is FeatureVariant.FFT1024:
        return RawInput(kind, spectrum.magnitudes)
    filterbank = _filterbank(n_filters, n_fft, region.sample_rate)
    return RawInput(kind, np.log(filterbank.apply(spectrum.magnitudes) + epsilon))
