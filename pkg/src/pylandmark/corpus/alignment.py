from dataclasses import dataclass

from pylandmark.common import AlignmentParseError, AlignmentStructureError


@dataclass(frozen=True)
class PhoneSegment:
    """One time-aligned phone"""

    label: str
    start: float
    end: float
    utterance_id: str = ""

    def __post_init__(self):
        if self.start < 0:
            raise AlignmentStructureError(f"segment '{self.label}' starts before 0 ({self.start})")
        if not self.end > self.start:
            raise AlignmentStructureError(f"segment '{self.label}' has end {self.end} <= start {self.start}")

    @property
    def duration(self) -> float:
        return self.end - self.start

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.start + self.end)

    def contains(self, time: float, tolerance: float = 0.0) -> bool:
        return self.start - tolerance <= time <= self.end + tolerance


def parse_alignment(text: str, sample_rate: int, utterance_id: str = "") -> list[PhoneSegment]:
    """Parse a TIMIT ``.phn`` style alignment (``start_sample end_sample phone`` per line)

    Returns segments sorted by start time, times in seconds.
    """
    if sample_rate <= 0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate}")

    segments: list[PhoneSegment] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise AlignmentParseError(line_number, f"expected '<start_sample> <end_sample> <phone>', got '{line}'")
        try:
            start, end = int(parts[0]), int(parts[1])
        except ValueError:
            raise AlignmentParseError(line_number, f"non-integer sample index in '{line}'") from None
        if end <= start:
            raise AlignmentStructureError(f"line {line_number}: segment '{parts[2]}' has end {end} <= start {start}")
        if start < 0:
            raise AlignmentStructureError(f"line {line_number}: negative start sample {start}")
        segments.append(PhoneSegment(parts[2], start / sample_rate, end / sample_rate, utterance_id))

    segments.sort(key=lambda s: (s.start, s.end))
    for prev, curr in zip(segments, segments[1:]):
        if curr.start < prev.end:
            raise AlignmentStructureError(f"segments '{prev.label}' [{prev.start:.4f}, {prev.end:.4f}] and '{curr.label}' [{curr.start:.4f}, {curr.end:.4f}] overlap")
    return segments


def write_alignment(segments: list[PhoneSegment], sample_rate: int) -> str:
    """Inverse of parse_alignment for segments whose times fall on sample boundaries"""
    lines = [f"{round(s.start * sample_rate)} {round(s.end * sample_rate)} {s.label}" for s in sorted(segments, key=lambda s: s.start)]
    return "".join(line + "\n" for line in lines)
