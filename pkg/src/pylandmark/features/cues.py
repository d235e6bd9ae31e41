"""The manual acoustic cue vector

rms, e1 (0-400 Hz energy), e2 (2000-7000 Hz energy), e1/e2, PNCC, H1, VOT
and the F1 transition slope into the following vowel. Every cue has a
defined value for degenerate input so vectors never contain gaps.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from pylandmark.common import NumericError
from pylandmark.corpus.alignment import PhoneSegment
from pylandmark.corpus.landmarks import LandmarkType
from pylandmark.corpus.regions import LandmarkRegion, slice_padded
from pylandmark.dsp.filters import E1_BAND, E2_BAND, band_energy, rms
from pylandmark.dsp.lpc import formants, lpc
from pylandmark.dsp.pitch import PitchConfig, track_pitch
from pylandmark.dsp.spectrum import hamming_window, magnitude_fft

# Use package-level logger
logger = logging.getLogger("pylandmark")

CUE_NAMES = ["rms", "e1", "e2", "e_ratio", "pncc", "h1", "vot", "formant_transition"]


@dataclass(frozen=True)
class CueConfig:
    pitch: PitchConfig = field(default_factory=PitchConfig)
    e1_band: tuple[float, float] = E1_BAND
    e2_band: tuple[float, float] = E2_BAND
    n_fft: int = 1024
    lpc_order: int = 14
    lpc_frame_s: float = 0.020
    lpc_hop_s: float = 0.005
    transition_span_s: float = 0.040
    f1_floor: float = 150.0
    ratio_epsilon: float = 1e-12
    include_f2: bool = False
    sample_rate: int = 16000


@dataclass(frozen=True)
class CueVector:
    rms: float
    e1: float
    e2: float
    e_ratio: float
    pncc: float
    h1: float
    vot: float
    formant_transition: float
    f2_transition: float | None = None

    def as_array(self) -> np.ndarray:
        values = [self.rms, self.e1, self.e2, self.e_ratio, self.pncc, self.h1, self.vot, self.formant_transition]
        if self.f2_transition is not None:
            values.append(self.f2_transition)
        return np.array(values, dtype=np.float64)

    def __len__(self) -> int:
        return 8 if self.f2_transition is None else 9


def voice_onset_time(region: LandmarkRegion, segment: PhoneSegment, release_segment: PhoneSegment | None = None) -> float:
    """Release duration for stops (closure samples borrow their release), full duration for fricatives"""
    if region.landmark.kind is LandmarkType.SC and release_segment is not None:
        return release_segment.duration
    return segment.duration


def formant_slopes(audio: np.ndarray, vowel: PhoneSegment, config: CueConfig, following: bool = True) -> tuple[float, float]:
    """Least-squares F1 and F2 slopes (Hz/s) over LPC frames on the vowel side of the consonant boundary

    The span starts at the onset of a following vowel, or ends at the offset
    of a preceding one.
    """
    sr = config.sample_rate
    frame_len = int(round(config.lpc_frame_s * sr))
    hop = int(round(config.lpc_hop_s * sr))
    span = int(round(config.transition_span_s * sr))
    onset = int(round(vowel.start * sr)) if following else int(round(vowel.end * sr)) - max(span, frame_len)
    n_frames = 1 + max(0, span - frame_len) // hop

    times, f1s, f2s = [], [], []
    for i in range(n_frames):
        start = onset + i * hop
        frame, _ = slice_padded(audio, start, frame_len)
        try:
            found = [f for f in formants(lpc(frame, config.lpc_order), sr) if f > config.f1_floor]
        except NumericError as e:
            logger.debug(f"{vowel.utterance_id}: LPC frame at sample {start} skipped ({e})")
            continue
        if not found:
            continue
        times.append((start + frame_len / 2.0) / sr)
        f1s.append(found[0])
        f2s.append(found[1] if len(found) > 1 else np.nan)

    f1_slope = float(np.polyfit(times, f1s, 1)[0]) if len(times) >= 2 else 0.0
    f2_valid = [(t, f) for t, f in zip(times, f2s) if not np.isnan(f)]
    f2_slope = float(np.polyfit(*zip(*f2_valid), 1)[0]) if len(f2_valid) >= 2 else 0.0
    return f1_slope, f2_slope


def manual_cues(
    region: LandmarkRegion,
    segment: PhoneSegment,
    adjacent_vowel: PhoneSegment | None,
    audio: np.ndarray,
    release_segment: PhoneSegment | None = None,
    config: CueConfig | None = None,
) -> CueVector:
    config = config or CueConfig()
    samples = region.samples
    e1 = band_energy(samples, config.e1_band, config.sample_rate, context=region.context)
    e2 = band_energy(samples, config.e2_band, config.sample_rate, context=region.context)

    # correlation windows start inside the region and may read max_lag samples past it
    analysis, _ = slice_padded(audio, region.start_index, len(samples) + config.pitch.max_lag)
    analysis[: len(samples)] = samples
    track = track_pitch(analysis, config.pitch)
    f0 = track.median_f0()
    h1 = 0.0
    if f0 is not None:
        spectrum = magnitude_fft(samples * hamming_window(len(samples)), config.n_fft, config.sample_rate)
        h1 = float(spectrum.magnitudes[spectrum.bin_of(f0)])

    f1_slope, f2_slope = (0.0, 0.0)
    if adjacent_vowel is not None:
        f1_slope, f2_slope = formant_slopes(audio, adjacent_vowel, config, following=adjacent_vowel.start >= segment.start)
    return CueVector(
        rms=rms(samples),
        e1=e1,
        e2=e2,
        e_ratio=e1 / (e2 + config.ratio_epsilon),
        pncc=track.voiced_pncc(),
        h1=h1,
        vot=voice_onset_time(region, segment, release_segment),
        formant_transition=f1_slope,
        f2_transition=f2_slope if config.include_f2 else None,
    )
