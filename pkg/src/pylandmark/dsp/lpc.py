from dataclasses import dataclass

import numpy as np

from pylandmark.common import NumericError
from pylandmark.dsp.spectrum import hamming_window

MAX_FORMANT_BANDWIDTH = 700.0


@dataclass(frozen=True)
class LpcModel:
    """All-pole model 1 / A(z), A(z) = 1 + a1 z^-1 + ... + ap z^-p"""

    order: int
    coefficients: np.ndarray  # [1, a1, ..., ap]
    gain: float
    reflection: np.ndarray

    def poles(self) -> np.ndarray:
        return np.roots(self.coefficients)


def levinson_durbin(r: np.ndarray, order: int) -> tuple[np.ndarray, float, np.ndarray]:
    """Solve the normal equations for autocorrelation r; returns (a, prediction error, reflection coefficients)"""
    a = np.zeros(order + 1)
    a[0] = 1.0
    k = np.zeros(order)
    error = float(r[0])
    if error <= 0:
        raise NumericError(f"non-positive frame energy {error}")
    for i in range(1, order + 1):
        acc = r[i] + np.dot(a[1:i], r[i - 1 : 0 : -1])
        k[i - 1] = -acc / error
        a[1:i] = a[1:i] + k[i - 1] * a[i - 1 : 0 : -1]
        a[i] = k[i - 1]
        error *= 1.0 - k[i - 1] ** 2
        if error <= 0:
            raise NumericError(f"Levinson recursion unstable at order {i} (prediction error {error:.3g})")
    return a, error, k


def lpc(frame: np.ndarray, order: int, window: bool = True) -> LpcModel:
    """Autocorrelation-method LPC of a (Hamming-windowed) frame"""
    frame = np.asarray(frame, dtype=np.float64)
    if order < 2:
        raise ValueError(f"LPC order must be >= 2, got {order}")
    if len(frame) <= 2 * order:
        raise ValueError(f"frame of {len(frame)} samples too short for order {order}")
    x = frame * hamming_window(len(frame)) if window else frame
    n = len(x)
    r = np.correlate(x, x, mode="full")[n - 1 : n + order]
    a, error, k = levinson_durbin(r, order)
    return LpcModel(order, a, float(np.sqrt(error)), k)


def formants(model: LpcModel, sample_rate: int = 16000, n: int | None = None, max_bandwidth: float = MAX_FORMANT_BANDWIDTH) -> list[float]:
    """Formant frequencies (Hz, ascending) from pole angles

    Poles outside the unit circle are reflected inside first; only
    upper-half-plane poles with bandwidth below max_bandwidth count.
    """
    roots = model.poles()
    outside = np.abs(roots) > 1.0
    roots[outside] = 1.0 / np.conj(roots[outside])
    roots = roots[np.imag(roots) > 0]
    freqs = np.angle(roots) * sample_rate / (2.0 * np.pi)
    with np.errstate(divide="ignore"):
        bandwidths = -sample_rate / np.pi * np.log(np.abs(roots))
    keep = sorted(float(f) for f, bw in zip(freqs, bandwidths) if bw < max_bandwidth and f > 0)
    return keep if n is None else keep[:n]
