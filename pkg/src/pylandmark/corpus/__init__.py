from .alignment import PhoneSegment, parse_alignment, write_alignment
from .audio import read_wav, write_wav
from .corpus import Corpus, Utterance
from .landmarks import Landmark, LandmarkType, derive_landmarks, read_landmark_file, write_landmark_file
from .phones import Manner, PhoneClass, PhoneClassMap, Voicing, label_voicing
from .regions import LandmarkRegion, extract_regions, region_bounds, region_length
from .synth import SynthCorpus, SynthSpec, SynthToken, SynthUtterance, synthesize_corpus, write_synth_corpus

__all__ = [
    "PhoneSegment",
    "parse_alignment",
    "write_alignment",
    "read_wav",
    "write_wav",
    "Corpus",
    "Utterance",
    "Landmark",
    "LandmarkType",
    "derive_landmarks",
    "read_landmark_file",
    "write_landmark_file",
    "Manner",
    "PhoneClass",
    "PhoneClassMap",
    "Voicing",
    "label_voicing",
    "LandmarkRegion",
    "extract_regions",
    "region_bounds",
    "region_length",
    "SynthCorpus",
    "SynthSpec",
    "SynthToken",
    "SynthUtterance",
    "synthesize_corpus",
    "write_synth_corpus",
]
