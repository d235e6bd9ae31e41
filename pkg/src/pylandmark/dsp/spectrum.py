from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def hamming_window(n: int) -> np.ndarray:
    """Symmetric Hamming window, w[k] = 0.54 - 0.46 cos(2 pi k / (n - 1)); n=1 gives [1.0]"""
    if n < 1:
        raise ValueError(f"window length must be >= 1, got {n}")
    if n == 1:
        return np.ones(1)
    return np.hamming(n)


def frame_signal(signal: np.ndarray, frame_len: int, hop: int) -> np.ndarray:
    """Split into overlapping frames (n_frames x frame_len)

    A signal shorter than one frame is zero-padded to a single frame; trailing
    samples that do not fill a whole frame are dropped.
    """
    if frame_len < 1 or hop < 1:
        raise ValueError(f"frame_len and hop must be >= 1, got {frame_len}, {hop}")
    signal = np.asarray(signal, dtype=np.float64)
    if len(signal) < frame_len:
        signal = np.concatenate([signal, np.zeros(frame_len - len(signal))])
    return sliding_window_view(signal, frame_len)[::hop].copy()


@dataclass(frozen=True)
class Spectrum:
    magnitudes: np.ndarray
    n_fft: int
    sample_rate: int

    @property
    def bin_hz(self) -> float:
        return self.sample_rate / self.n_fft

    def frequencies(self) -> np.ndarray:
        return np.arange(len(self.magnitudes)) * self.bin_hz

    def bin_of(self, freq: float) -> int:
        """Nearest bin to freq"""
        return int(np.clip(round(freq / self.bin_hz), 0, len(self.magnitudes) - 1))


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def magnitude_fft(frame: np.ndarray, n_fft: int = 1024, sample_rate: int = 16000) -> Spectrum:
    """|DFT| of frame zero-padded to n_fft, bins 0..n_fft/2"""
    if not _is_power_of_two(n_fft):
        raise ValueError(f"n_fft must be a power of two, got {n_fft}")
    frame = np.asarray(frame, dtype=np.float64)
    if len(frame) > n_fft:
        raise ValueError(f"frame of {len(frame)} samples is longer than n_fft={n_fft}")
    return Spectrum(np.abs(np.fft.rfft(frame, n=n_fft)), n_fft, sample_rate)
