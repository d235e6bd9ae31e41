from dataclasses import dataclass

import numpy as np
from scipy.fft import dct

from pylandmark.dsp.mel import MelFilterbank, mel_filterbank
from pylandmark.dsp.spectrum import frame_signal, hamming_window


@dataclass(frozen=True)
class MfccConfig:
    n_ceps: int = 13
    include_deltas: bool = False
    pre_emphasis: float = 0.97
    frame_len_s: float = 0.010
    frame_hop_s: float = 0.005
    delta_window: int = 2
    n_fft: int = 1024
    n_filters: int = 40
    log_floor: float = 1e-10
    lifter: int = 0  # 0 = off
    sample_rate: int = 16000

    def __post_init__(self):
        if self.n_ceps > self.n_filters:
            raise ValueError(f"n_ceps ({self.n_ceps}) must not exceed n_filters ({self.n_filters})")
        if self.delta_window < 1:
            raise ValueError(f"delta_window must be >= 1, got {self.delta_window}")
        if self.frame_len_s <= 0 or self.frame_hop_s <= 0:
            raise ValueError("frame length and hop must be positive")
        if self.frame_samples > self.n_fft:
            raise ValueError(f"frame of {self.frame_samples} samples does not fit n_fft={self.n_fft}")

    @property
    def frame_samples(self) -> int:
        return int(round(self.frame_len_s * self.sample_rate))

    @property
    def hop_samples(self) -> int:
        return int(round(self.frame_hop_s * self.sample_rate))

    @property
    def dim(self) -> int:
        return self.n_ceps * 3 if self.include_deltas else self.n_ceps

    def filterbank(self) -> MelFilterbank:
        return mel_filterbank(self.n_filters, self.n_fft, self.sample_rate)


def mfcc_frames(signal: np.ndarray, config: MfccConfig | None = None, filterbank: MelFilterbank | None = None) -> np.ndarray:
    """Static MFCCs per frame (n_frames x n_ceps), coefficients 0..n_ceps-1

    Per frame: pre-emphasis, Hamming, power spectrum, mel energies, floored
    log, orthonormal DCT-II.
    """
    config = config or MfccConfig()
    filterbank = filterbank or config.filterbank()
    frames = frame_signal(signal, config.frame_samples, config.hop_samples)
    emphasized = frames.copy()
    emphasized[:, 1:] -= config.pre_emphasis * frames[:, :-1]
    windowed = emphasized * hamming_window(config.frame_samples)
    power = np.abs(np.fft.rfft(windowed, n=config.n_fft, axis=1)) ** 2
    log_energies = np.log(np.maximum(filterbank.apply(power), config.log_floor))
    ceps = dct(log_energies, type=2, norm="ortho", axis=1)[:, : config.n_ceps]
    if config.lifter > 0:
        n = np.arange(config.n_ceps)
        ceps = ceps * (1.0 + 0.5 * config.lifter * np.sin(np.pi * n / config.lifter))
    return ceps


def deltas(coefficients: np.ndarray, window: int = 2) -> np.ndarray:
    """Regression deltas d_t = sum_n n (c_{t+n} - c_{t-n}) / (2 sum_n n^2), edges replicated"""
    if window < 1:
        raise ValueError(f"delta window must be >= 1, got {window}")
    coefficients = np.asarray(coefficients, dtype=np.float64)
    squeeze = coefficients.ndim == 1
    if squeeze:
        coefficients = coefficients[:, None]
    if len(coefficients) < 1:
        raise ValueError("empty coefficient sequence")
    n_frames = len(coefficients)
    padded = np.pad(coefficients, ((window, window), (0, 0)), mode="edge")
    out = np.zeros_like(coefficients)
    for n in range(1, window + 1):
        out += n * (padded[window + n : window + n + n_frames] - padded[window - n : window - n + n_frames])
    out /= 2.0 * sum(n * n for n in range(1, window + 1))
    return out[:, 0] if squeeze else out


def mfcc_with_deltas(signal: np.ndarray, config: MfccConfig | None = None, filterbank: MelFilterbank | None = None) -> np.ndarray:
    """Statics, deltas and delta-deltas (n_frames x 3 n_ceps) when config.include_deltas, else statics"""
    config = config or MfccConfig()
    static = mfcc_frames(signal, config, filterbank)
    if not config.include_deltas:
        return static
    d1 = deltas(static, config.delta_window)
    d2 = deltas(d1, config.delta_window)
    return np.hstack([static, d1, d2])
