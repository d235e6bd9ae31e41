import logging
from dataclasses import dataclass, field

import numpy as np

from pylandmark.corpus.alignment import PhoneSegment
from pylandmark.corpus.landmarks import Landmark, derive_landmarks
from pylandmark.corpus.phones import Manner, PhoneClassMap
from pylandmark.corpus.regions import extract_regions
from pylandmark.dsp.mfcc import MfccConfig
from pylandmark.features.cues import CueConfig, manual_cues
from pylandmark.features.spectral import mfcc_features, raw_nn_input
from pylandmark.features.table import FeatureRow
from pylandmark.features.variants import FeatureVariant

# Use package-level logger
logger = logging.getLogger("pylandmark")


@dataclass(frozen=True)
class FeatureSettings:
    cues: CueConfig = field(default_factory=CueConfig)
    mfcc: MfccConfig = field(default_factory=MfccConfig)
    n_fft: int = 1024
    n_filters: int = 40

    def dim(self, variant: FeatureVariant) -> int:
        return variant.dim(include_f2=self.cues.include_f2)


def neighbours(segments: list[PhoneSegment], segment: PhoneSegment, phone_map: PhoneClassMap) -> tuple[PhoneSegment | None, PhoneSegment | None]:
    """(release segment, adjacent vowel) for an obstruent segment

    A closure's release is the segment right after it when that is a stop
    release. The adjacent vowel is the segment following the obstruent (or
    its release), else the vowel right before the obstruent.
    """
    index = segments.index(segment)
    release = None
    after = index + 1
    if phone_map.manner(segment.label) is Manner.STOP_CLOSURE and after < len(segments):
        if phone_map.manner(segments[after].label) is Manner.STOP_RELEASE:
            release = segments[after]
            after += 1
    vowel = None
    if after < len(segments) and phone_map.manner(segments[after].label) is Manner.VOWEL:
        vowel = segments[after]
    elif index > 0 and phone_map.manner(segments[index - 1].label) is Manner.VOWEL:
        vowel = segments[index - 1]
    return release, vowel


def extract_utterance_features(
    utterance_id: str,
    audio: np.ndarray,
    segments: list[PhoneSegment],
    phone_map: PhoneClassMap,
    variant: FeatureVariant,
    landmarks: list[Landmark] | None = None,
    settings: FeatureSettings | None = None,
    sample_rate: int = 16000,
) -> list[FeatureRow]:
    """One feature row per obstruent landmark region, in landmark order"""
    settings = settings or FeatureSettings()
    if landmarks is None:
        landmarks = derive_landmarks(segments, phone_map)
    rows = []
    for region in extract_regions(audio, segments, landmarks, phone_map, sample_rate):
        segment = region.segment
        if variant is FeatureVariant.CUES:
            release, vowel = neighbours(segments, segment, phone_map)
            values = manual_cues(region, segment, vowel, audio, release_segment=release, config=settings.cues).as_array()
        elif variant.is_mfcc:
            values = mfcc_features(audio, segment, region, variant, settings.mfcc)
        else:
            values = raw_nn_input(region, variant, settings.n_fft, settings.n_filters).values
        rows.append(FeatureRow(utterance_id, region.landmark.time, region.landmark.kind.value, region.label, values))
    logger.debug(f"{utterance_id}: {len(rows)} {variant} rows")
    return rows
