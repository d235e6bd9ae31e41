import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import buttord, butter, sosfilt, sosfreqz

from pylandmark.common import FilterDesignError

# Use package-level logger
logger = logging.getLogger("pylandmark")

E1_BAND = (0.0, 400.0)
E2_BAND = (2000.0, 7000.0)


@dataclass(frozen=True)
class BandpassSpec:
    """Passband / stopband edges in Hz; pass_lo = 0 designs a lowpass (stop_lo unused)"""

    pass_lo: float
    pass_hi: float
    stop_lo: float | None
    stop_hi: float
    max_passband_ripple_db: float = 3.0
    min_stopband_atten_db: float = 40.0

    @classmethod
    def for_band(cls, pass_lo: float, pass_hi: float, sample_rate: int = 16000, margin: float = 0.25) -> "BandpassSpec":
        """Stopband edges `margin` beyond the passband, the upper one capped halfway to Nyquist"""
        nyquist = sample_rate / 2.0
        stop_lo = pass_lo * (1.0 - margin) if pass_lo > 0 else None
        stop_hi = min(pass_hi * (1.0 + margin), 0.5 * (pass_hi + nyquist))
        return cls(pass_lo, pass_hi, stop_lo, stop_hi)

    @property
    def is_lowpass(self) -> bool:
        return self.pass_lo <= 0.0

    def validate(self, sample_rate: int) -> None:
        nyquist = sample_rate / 2.0
        if self.is_lowpass:
            ok = 0.0 < self.pass_hi < self.stop_hi < nyquist
        else:
            ok = self.stop_lo is not None and 0.0 < self.stop_lo < self.pass_lo < self.pass_hi < self.stop_hi < nyquist
        if not ok:
            raise FilterDesignError(f"infeasible band edges at {sample_rate} Hz: stop_lo={self.stop_lo} pass=({self.pass_lo}, {self.pass_hi}) stop_hi={self.stop_hi}")
        if self.max_passband_ripple_db <= 0 or self.min_stopband_atten_db <= self.max_passband_ripple_db:
            raise FilterDesignError(f"need 0 < ripple ({self.max_passband_ripple_db} dB) < attenuation ({self.min_stopband_atten_db} dB)")


@dataclass(frozen=True)
class BandpassFilter:
    spec: BandpassSpec
    sos: np.ndarray
    order: int
    sample_rate: int

    def apply(self, signal: np.ndarray, context: np.ndarray | None = None) -> np.ndarray:
        """Causal single-pass filtering; context samples warm the filter up and are dropped from the output"""
        signal = np.asarray(signal, dtype=np.float64)
        if context is None or len(context) == 0:
            return sosfilt(self.sos, signal)
        full = np.concatenate([np.asarray(context, dtype=np.float64), signal])
        return sosfilt(self.sos, full)[len(context) :]

    def frequency_response(self, freqs) -> np.ndarray:
        """|H(e^jw)| at the given frequencies (Hz)"""
        _, h = sosfreqz(self.sos, worN=np.atleast_1d(np.asarray(freqs, dtype=np.float64)), fs=self.sample_rate)
        return np.abs(h)


def butterworth_bandpass(spec: BandpassSpec, sample_rate: int = 16000) -> BandpassFilter:
    """Minimal-order digital Butterworth meeting the ripple / attenuation spec, as second-order sections"""
    spec.validate(sample_rate)
    if spec.is_lowpass:
        wp, ws, btype = spec.pass_hi, spec.stop_hi, "lowpass"
    else:
        wp, ws, btype = [spec.pass_lo, spec.pass_hi], [spec.stop_lo, spec.stop_hi], "bandpass"
    order, wn = buttord(wp, ws, spec.max_passband_ripple_db, spec.min_stopband_atten_db, fs=sample_rate)
    sos = butter(order, wn, btype=btype, fs=sample_rate, output="sos")
    logger.debug(f"Butterworth {btype} {wp} Hz: order {order}")
    return BandpassFilter(spec, sos, int(order), sample_rate)


@lru_cache(maxsize=None)
def band_filter(pass_lo: float, pass_hi: float, sample_rate: int = 16000) -> BandpassFilter:
    """Default-spec filter for a band, designed once per (band, rate)"""
    return butterworth_bandpass(BandpassSpec.for_band(pass_lo, pass_hi, sample_rate), sample_rate)


def rms(signal: np.ndarray) -> float:
    signal = np.asarray(signal, dtype=np.float64)
    if signal.size == 0:
        raise ValueError("rms of an empty signal")
    return float(np.sqrt(np.mean(signal * signal)))


def band_energy(signal: np.ndarray, band: tuple[float, float] | BandpassFilter, sample_rate: int = 16000, context: np.ndarray | None = None) -> float:
    """Mean square of the band-filtered signal"""
    signal = np.asarray(signal, dtype=np.float64)
    if signal.size == 0:
        raise ValueError("band energy of an empty signal")
    filt = band if isinstance(band, BandpassFilter) else band_filter(float(band[0]), float(band[1]), sample_rate)
    y = filt.apply(signal, context)
    return float(np.mean(y * y))
