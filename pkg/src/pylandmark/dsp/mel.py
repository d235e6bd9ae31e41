from dataclasses import dataclass

import numpy as np


def hz_to_mel(freq):
    return 2595.0 * np.log10(1.0 + np.asarray(freq, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MelFilterbank:
    n_filters: int
    weights: np.ndarray  # n_filters x (n_fft/2 + 1)
    edges: np.ndarray  # n_filters x 3: (lower, center, upper) Hz
    n_fft: int
    sample_rate: int

    @property
    def centers(self) -> np.ndarray:
        return self.edges[:, 1]

    def apply(self, magnitudes: np.ndarray) -> np.ndarray:
        """Filterbank energies; works on one spectrum or a stack of them"""
        return np.asarray(magnitudes) @ self.weights.T


def mel_filterbank(n_filters: int = 40, n_fft: int = 1024, sample_rate: int = 16000, f_lo: float = 0.0, f_hi: float | None = None) -> MelFilterbank:
    """Triangular filters equally spaced on the mel scale

    Filter i spans mel points i..i+2 and peaks at i+1, so neighbouring
    triangles share edges. Raises when a filter covers no FFT bin.
    """
    if f_hi is None:
        f_hi = sample_rate / 2.0
    if not 0.0 <= f_lo < f_hi <= sample_rate / 2.0:
        raise ValueError(f"need 0 <= f_lo < f_hi <= {sample_rate / 2}, got {f_lo}, {f_hi}")
    if n_filters < 1:
        raise ValueError(f"n_filters must be >= 1, got {n_filters}")

    points = mel_to_hz(np.linspace(hz_to_mel(f_lo), hz_to_mel(f_hi), n_filters + 2))
    bins = np.arange(n_fft // 2 + 1) * sample_rate / n_fft
    weights = np.zeros((n_filters, len(bins)))
    for i in range(n_filters):
        lo, center, hi = points[i], points[i + 1], points[i + 2]
        rising = (bins - lo) / (center - lo)
        falling = (hi - bins) / (hi - center)
        weights[i] = np.clip(np.minimum(rising, falling), 0.0, None)
        if not weights[i].any():
            raise ValueError(f"mel filter {i} ({lo:.1f}-{hi:.1f} Hz) covers no FFT bin; too many filters for n_fft={n_fft}")
    edges = np.stack([points[:-2], points[1:-1], points[2:]], axis=1)
    return MelFilterbank(n_filters, weights, edges, n_fft, sample_rate)
