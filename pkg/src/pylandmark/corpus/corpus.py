import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from pylandmark.common import SAMPLE_RATE, DataError, UnmappedPhoneError
from pylandmark.corpus.alignment import PhoneSegment, parse_alignment
from pylandmark.corpus.audio import read_wav
from pylandmark.corpus.landmarks import Landmark, derive_landmarks
from pylandmark.corpus.phones import PhoneClassMap, Voicing

# Use package-level logger
logger = logging.getLogger("pylandmark")


@dataclass
class Utterance:
    utterance_id: str
    segments: list[PhoneSegment]
    alignment_path: Path | None = None
    audio_path: Path | None = None
    sample_rate: int = SAMPLE_RATE
    _audio: np.ndarray | None = field(default=None, repr=False)

    def audio(self) -> np.ndarray:
        """Waveform, loaded on first access"""
        if self._audio is None:
            if self.audio_path is None or not self.audio_path.exists():
                raise DataError(f"missing audio for utterance '{self.utterance_id}'")
            self._audio = read_wav(self.audio_path, self.sample_rate)
        return self._audio

    def has_audio(self) -> bool:
        return self._audio is not None or (self.audio_path is not None and self.audio_path.exists())

    def landmarks(self, phone_map: PhoneClassMap) -> list[Landmark]:
        return derive_landmarks(self.segments, phone_map)


class Corpus:
    """Utterance registry for one corpus directory

    Layout: ``<root>/alignments/*.phn`` and ``<root>/audio/*.wav``, or both
    kinds of file side by side in ``<root>``. Utterance ids are file stems.
    """

    def __init__(self, corpus_id: str, phone_map: PhoneClassMap, sample_rate: int = SAMPLE_RATE):
        self.corpus_id = corpus_id
        self.phone_map = phone_map
        self.sample_rate = sample_rate
        self._utt_domain: dict[str, Utterance] = {}

    @classmethod
    def load(
        cls,
        root: str | Path,
        phone_map: PhoneClassMap,
        corpus_id: str | None = None,
        alignment_dir: str | Path | None = None,
        audio_dir: str | Path | None = None,
        sample_rate: int = SAMPLE_RATE,
    ) -> "Corpus":
        root = Path(root)
        alignment_dir = Path(alignment_dir) if alignment_dir else _pick_dir(root, "alignments")
        audio_dir = Path(audio_dir) if audio_dir else _pick_dir(root, "audio")
        corpus = cls(corpus_id or root.name, phone_map, sample_rate)

        paths = sorted(alignment_dir.glob("*.phn")) if alignment_dir.is_dir() else []
        if not paths:
            raise DataError(f"no alignments found in {alignment_dir}")
        for path in paths:
            utt_id = path.stem
            segments = parse_alignment(path.read_text(encoding="utf-8"), sample_rate, utt_id)
            corpus.add(Utterance(utt_id, segments, alignment_path=path, audio_path=audio_dir / f"{utt_id}.wav", sample_rate=sample_rate))
        logger.info(f"Loaded corpus '{corpus.corpus_id}' ({len(paths)} utterances)")
        return corpus

    def add(self, utterance: Utterance) -> None:
        self._utt_domain[utterance.utterance_id] = utterance

    def get_utterance(self, utterance_id: str) -> Utterance:
        return self._utt_domain[utterance_id]

    def get_utterances(self) -> list[Utterance]:
        """All utterances sorted by id"""
        return [self._utt_domain[k] for k in sorted(self._utt_domain)]

    def __len__(self) -> int:
        return len(self._utt_domain)

    def check_phones(self) -> None:
        """Raise UnmappedPhoneError naming every unmapped phone with its count"""
        counts = Counter(s.label for u in self._utt_domain.values() for s in u.segments if s.label not in self.phone_map)
        if counts:
            for phone, count in sorted(counts.items()):
                logger.error(f"{self.corpus_id}: unmapped phone '{phone}' x{count}")
            raise UnmappedPhoneError(min(counts), dict(counts))

    def class_distribution(self) -> dict[Voicing, int]:
        """Voiced / unvoiced counts of obstruent landmarks (one sample per landmark)"""
        counts = {Voicing.VOICED: 0, Voicing.UNVOICED: 0}
        for utt in self.get_utterances():
            for lm in utt.landmarks(self.phone_map):
                if lm.kind.is_obstruent and lm.source_segment is not None:
                    counts[self.phone_map.voicing(lm.source_segment.label)] += 1
        return counts


def _pick_dir(root: Path, name: str) -> Path:
    sub = root / name
    return sub if sub.is_dir() else root
