from dataclasses import dataclass, field
from enum import Enum

from pylandmark.common import LandmarkFormatError
from pylandmark.corpus.alignment import PhoneSegment
from pylandmark.corpus.phones import Manner, PhoneClassMap


class LandmarkType(Enum):
    """Landmark inventory: closure/release per manner (S=stop, F=fricative, N=nasal), vowel and glide points"""

    SC = "Sc"
    SR = "Sr"
    FC = "Fc"
    FR = "Fr"
    NC = "Nc"
    NR = "Nr"
    V = "V"
    G = "G"

    def __str__(self) -> str:
        return self.value

    @property
    def is_closure(self) -> bool:
        return self in (LandmarkType.SC, LandmarkType.FC, LandmarkType.NC)

    @property
    def is_release(self) -> bool:
        return self in (LandmarkType.SR, LandmarkType.FR, LandmarkType.NR)

    @property
    def is_point(self) -> bool:
        return self in (LandmarkType.V, LandmarkType.G)

    @property
    def is_obstruent(self) -> bool:
        """Only stop and fricative landmarks anchor classification regions"""
        return self in (LandmarkType.SC, LandmarkType.SR, LandmarkType.FC, LandmarkType.FR)


_TYPE_ORDER = {kind: i for i, kind in enumerate(LandmarkType)}


@dataclass(frozen=True)
class Landmark:
    time: float
    kind: LandmarkType
    # landmarks read back from a file have no segment
    source_segment: PhoneSegment | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.source_segment is not None and not self.source_segment.contains(self.time, tolerance=1e-9):
            raise ValueError(f"{self.kind} landmark at {self.time} outside its segment [{self.source_segment.start}, {self.source_segment.end}]")

    def sort_key(self) -> tuple[float, int, float]:
        seg_start = self.source_segment.start if self.source_segment is not None else self.time
        return (self.time, _TYPE_ORDER[self.kind], seg_start)


def derive_landmarks(segments: list[PhoneSegment], phone_map: PhoneClassMap) -> list[Landmark]:
    """Landmarks from a phone alignment

    Stop release -> Sr at start, stop closure -> Sc at start, fricative and
    affricate -> Fc at start + Fr at end, nasal -> Nc at start + Nr at end,
    vowel -> V and glide -> G at the midpoint. Other phones yield nothing.
    """
    landmarks: list[Landmark] = []
    for seg in sorted(segments, key=lambda s: (s.start, s.end, s.label)):
        manner = phone_map.manner(seg.label)
        if manner is Manner.STOP_RELEASE:
            landmarks.append(Landmark(seg.start, LandmarkType.SR, seg))
        elif manner is Manner.STOP_CLOSURE:
            landmarks.append(Landmark(seg.start, LandmarkType.SC, seg))
        elif manner in (Manner.FRICATIVE, Manner.AFFRICATE):
            landmarks.append(Landmark(seg.start, LandmarkType.FC, seg))
            landmarks.append(Landmark(seg.end, LandmarkType.FR, seg))
        elif manner is Manner.NASAL:
            landmarks.append(Landmark(seg.start, LandmarkType.NC, seg))
            landmarks.append(Landmark(seg.end, LandmarkType.NR, seg))
        elif manner is Manner.VOWEL:
            landmarks.append(Landmark(seg.midpoint, LandmarkType.V, seg))
        elif manner is Manner.GLIDE:
            landmarks.append(Landmark(seg.midpoint, LandmarkType.G, seg))
    landmarks.sort(key=Landmark.sort_key)
    return landmarks


def write_landmark_file(landmarks: list[Landmark]) -> str:
    """Landmark transcription: ``<time_s>\\t<type>`` per line, 4 decimals"""
    return "".join(f"{lm.time:.4f}\t{lm.kind.value}\n" for lm in landmarks)


def read_landmark_file(text: str) -> list[Landmark]:
    landmarks: list[Landmark] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise LandmarkFormatError(f"line {line_number}: expected '<time>\\t<type>', got '{line}'")
        try:
            time = float(parts[0])
        except ValueError:
            raise LandmarkFormatError(f"line {line_number}: bad time '{parts[0]}'") from None
        try:
            kind = LandmarkType(parts[1])
        except ValueError:
            raise LandmarkFormatError(f"line {line_number}: unknown landmark type '{parts[1]}'") from None
        landmarks.append(Landmark(time, kind))
    return landmarks
