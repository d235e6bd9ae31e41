import logging
from dataclasses import dataclass

import numpy as np

from pylandmark.common import CONTEXT_SAMPLES, REGION_SECONDS, SAMPLE_RATE, DataError
from pylandmark.corpus.alignment import PhoneSegment
from pylandmark.corpus.landmarks import Landmark, LandmarkType
from pylandmark.corpus.phones import Manner, PhoneClassMap, Voicing, label_voicing

# Use package-level logger
logger = logging.getLogger("pylandmark")

_SNAP_TOLERANCE = 0.5e-4 + 1e-9  # landmark files print 4 decimals


@dataclass
class LandmarkRegion:
    """20 ms of waveform anchored at an obstruent landmark: the unit of classification"""

    samples: np.ndarray
    landmark: Landmark
    label: Voicing
    region_bounds: tuple[float, float]
    padded: bool = False
    context: np.ndarray | None = None  # samples preceding the region, for filter warm-up
    sample_rate: int = SAMPLE_RATE

    @property
    def segment(self) -> PhoneSegment:
        assert self.landmark.source_segment is not None
        return self.landmark.source_segment

    @property
    def start_index(self) -> int:
        return int(round(self.region_bounds[0] * self.sample_rate))


def region_length(sample_rate: int = SAMPLE_RATE) -> int:
    return int(round(REGION_SECONDS * sample_rate))


def region_bounds(landmark: Landmark) -> tuple[float, float]:
    """Closure landmarks look forward (+20 ms), release landmarks look back (-20 ms)"""
    if landmark.kind.is_closure:
        return (landmark.time, landmark.time + REGION_SECONDS)
    if landmark.kind.is_release:
        return (landmark.time - REGION_SECONDS, landmark.time)
    raise ValueError(f"{landmark.kind} landmarks have no region")


def slice_padded(audio: np.ndarray, start: int, length: int) -> tuple[np.ndarray, bool]:
    """audio[start:start+length] with zeros outside the signal"""
    out = np.zeros(length, dtype=np.float64)
    lo = max(start, 0)
    hi = min(start + length, len(audio))
    if hi > lo:
        out[lo - start : hi - start] = audio[lo:hi]
    padded = start < 0 or start + length > len(audio)
    return out, padded


def resolve_segment(landmark: Landmark, segments: list[PhoneSegment], phone_map: PhoneClassMap) -> PhoneSegment:
    """Find the segment a landmark was derived from (needed for landmarks read from files)"""
    if landmark.source_segment is not None:
        return landmark.source_segment
    for seg in segments:
        manner = phone_map.manner(seg.label)
        if landmark.kind is LandmarkType.SC and manner is Manner.STOP_CLOSURE and abs(seg.start - landmark.time) <= _SNAP_TOLERANCE:
            return seg
        if landmark.kind is LandmarkType.SR and manner is Manner.STOP_RELEASE and abs(seg.start - landmark.time) <= _SNAP_TOLERANCE:
            return seg
        if manner in (Manner.FRICATIVE, Manner.AFFRICATE):
            if landmark.kind is LandmarkType.FC and abs(seg.start - landmark.time) <= _SNAP_TOLERANCE:
                return seg
            if landmark.kind is LandmarkType.FR and abs(seg.end - landmark.time) <= _SNAP_TOLERANCE:
                return seg
    raise DataError(f"no segment matches {landmark.kind} landmark at {landmark.time:.4f}")


def extract_regions(
    audio: np.ndarray,
    segments: list[PhoneSegment],
    landmarks: list[Landmark],
    phone_map: PhoneClassMap,
    sample_rate: int = SAMPLE_RATE,
) -> list[LandmarkRegion]:
    """Cut one labeled region per obstruent landmark (Sc, Sr, Fc, Fr)

    Nasal, vowel and glide landmarks are skipped. Regions running past either
    end of the audio are zero-padded to the full 20 ms and flagged.
    """
    audio = np.asarray(audio, dtype=np.float64)
    n = region_length(sample_rate)
    regions: list[LandmarkRegion] = []
    for landmark in landmarks:
        if not landmark.kind.is_obstruent:
            continue
        segment = resolve_segment(landmark, segments, phone_map)
        if landmark.source_segment is None:
            # snap file times (4 decimals) back onto the alignment
            time = segment.end if landmark.kind is LandmarkType.FR else segment.start
            landmark = Landmark(time, landmark.kind, segment)
        bounds = region_bounds(landmark)
        start = int(round(bounds[0] * sample_rate))
        samples, padded = slice_padded(audio, start, n)
        context, _ = slice_padded(audio, start - CONTEXT_SAMPLES, CONTEXT_SAMPLES)
        if padded:
            logger.debug(f"{segment.utterance_id}: {landmark.kind} region at {landmark.time:.4f}s zero-padded")
        regions.append(
            LandmarkRegion(
                samples=samples,
                landmark=landmark,
                label=label_voicing(segment, phone_map),
                region_bounds=bounds,
                padded=padded,
                context=context,
                sample_rate=sample_rate,
            )
        )
    return regions
