import logging
from fractions import Fraction
from pathlib import Path

import numpy as np
import soundfile as sf
from scipy.signal import resample_poly

from pylandmark.common import SAMPLE_RATE, DataError

# Use package-level logger
logger = logging.getLogger("pylandmark")


def read_wav(path: str | Path, target_rate: int = SAMPLE_RATE) -> np.ndarray:
    """Read a mono 16-bit PCM WAV file as float64 in [-1, 1), resampling to target_rate if needed"""
    try:
        info = sf.info(str(path))
    except sf.LibsndfileError as e:
        raise DataError(f"{path}: cannot read audio ({e})") from e
    if info.subtype != "PCM_16":
        raise DataError(f"{path}: expected 16-bit PCM, got {info.subtype}")
    audio, rate = sf.read(str(path), dtype="float64", always_2d=False)
    if audio.ndim != 1:
        raise DataError(f"{path}: expected mono audio, got {audio.shape[1]} channels")
    if rate != target_rate:
        logger.warning(f"{path}: resampling {rate} Hz -> {target_rate} Hz")
        ratio = Fraction(target_rate, rate)
        audio = resample_poly(audio, ratio.numerator, ratio.denominator)
    return audio


def write_wav(path: str | Path, audio: np.ndarray, sample_rate: int = SAMPLE_RATE) -> None:
    """Write 16-bit PCM mono"""
    sf.write(str(path), np.asarray(audio, dtype=np.float64), sample_rate, subtype="PCM_16")
