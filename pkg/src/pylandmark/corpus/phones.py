import logging
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from pylandmark.common import DataError, NotObstruentError, UnmappedPhoneError

# Use package-level logger
logger = logging.getLogger("pylandmark")


class Manner(Enum):
    """Manner class of a phone"""

    STOP_CLOSURE = "stop_closure"
    STOP_RELEASE = "stop_release"
    FRICATIVE = "fricative"
    AFFRICATE = "affricate"
    NASAL = "nasal"
    VOWEL = "vowel"
    GLIDE = "glide"
    OTHER = "other"

    def __str__(self) -> str:
        return self.value

    @property
    def is_obstruent(self) -> bool:
        return self in OBSTRUENT_MANNERS


OBSTRUENT_MANNERS = frozenset({Manner.STOP_CLOSURE, Manner.STOP_RELEASE, Manner.FRICATIVE, Manner.AFFRICATE})


class Voicing(Enum):
    """Voicing label; NA for everything that is not an obstruent"""

    VOICED = "voiced"
    UNVOICED = "unvoiced"
    NA = "n/a"

    def __str__(self) -> str:
        return self.value

    @property
    def as_int(self) -> int:
        """1 for voiced (the positive class), 0 for unvoiced"""
        if self is Voicing.NA:
            raise ValueError("n/a voicing has no class index")
        return 1 if self is Voicing.VOICED else 0

    @classmethod
    def from_int(cls, value: int) -> "Voicing":
        return cls.VOICED if int(value) == 1 else cls.UNVOICED


@dataclass(frozen=True)
class PhoneClass:
    manner: Manner
    voicing: Voicing

    def __post_init__(self):
        if self.manner.is_obstruent == (self.voicing is Voicing.NA):
            raise DataError(f"voicing must be n/a exactly for non-obstruents (manner={self.manner}, voicing={self.voicing})")

    @property
    def is_obstruent(self) -> bool:
        return self.manner.is_obstruent


class PhoneClassMap:
    """Phone symbol -> (manner, voicing) table

    Stored on disk as plain text, one ``phone manner voicing`` row per line,
    lines starting with ``#`` are comments. Alternative languages plug in by shipping another
    table file.
    """

    def __init__(self, entries: dict[str, PhoneClass] | None = None, name: str = "custom"):
        self.entries: dict[str, PhoneClass] = dict(entries or {})
        self.name = name

    @classmethod
    def from_text(cls, text: str, name: str = "custom") -> "PhoneClassMap":
        entries: dict[str, PhoneClass] = {}
        for line_number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            # whole-line comments only: TIMIT uses "h#" as a phone
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise DataError(f"phone map line {line_number}: expected 'phone manner voicing', got '{raw.strip()}'")
            phone, manner, voicing = parts
            try:
                entries[phone] = PhoneClass(Manner(manner), Voicing(voicing))
            except ValueError as e:
                raise DataError(f"phone map line {line_number}: {e}") from e
        return cls(entries, name=name)

    @classmethod
    def load(cls, path: str | Path) -> "PhoneClassMap":
        path = Path(path)
        return cls.from_text(path.read_text(encoding="utf-8"), name=path.stem)

    @classmethod
    def default(cls) -> "PhoneClassMap":
        """Bundled English (TIMIT) phone map"""
        text = resources.files("pylandmark").joinpath("data/english.phonemap").read_text(encoding="utf-8")
        return cls.from_text(text, name="english")

    def to_text(self) -> str:
        lines = [f"{phone} {cls.manner} {cls.voicing}" for phone, cls in sorted(self.entries.items())]
        return "\n".join(lines) + "\n"

    def __contains__(self, phone: str) -> bool:
        return phone in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, phone: str) -> PhoneClass:
        try:
            return self.entries[phone]
        except KeyError:
            raise UnmappedPhoneError(phone) from None

    def manner(self, phone: str) -> Manner:
        return self.lookup(phone).manner

    def voicing(self, phone: str) -> Voicing:
        return self.lookup(phone).voicing

    def obstruents(self, voicing: Voicing | None = None) -> list[str]:
        """Obstruent phones, optionally restricted to one voicing"""
        return sorted(p for p, c in self.entries.items() if c.is_obstruent and (voicing is None or c.voicing is voicing))

    def unmapped(self, phones: list[str]) -> list[str]:
        return sorted({p for p in phones if p not in self.entries})


def label_voicing(segment, phone_map: PhoneClassMap) -> Voicing:
    """Voicing of an obstruent segment; raises for anything else"""
    phone_class = phone_map.lookup(segment.label)
    if not phone_class.is_obstruent:
        raise NotObstruentError(f"'{segment.label}' is a {phone_class.manner}, not an obstruent")
    return phone_class.voicing
