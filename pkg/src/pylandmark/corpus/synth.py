"""Synthetic labeled corpora with known ground truth

Each utterance is silence, a run of obstruent+vowel tokens, silence. Voiced
tokens carry a band-limited pulse train at the token F0; unvoiced tokens are
shaped noise only. Stops are a closure (>= 40 ms) followed by a 10-20 ms
burst and the release segment whose duration is the VOT; fricatives are
2-7 kHz noise. Every token ends in a two-resonator vowel whose F1 glides in
from a low onset after voiced obstruents and starts near target otherwise.

A fixed share of tokens (ambiguous_fraction) keeps its phone label but is
realised with the other class's acoustics, the way voiced obstruents are
often devoiced in running speech. noise_band_scale moves the frication,
burst and aspiration bands to model a shifted recording regime.
"""

import configparser
import csv
import logging
from dataclasses import dataclass, field, fields
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.signal import butter, lfilter, sosfilt

from pylandmark.common import SAMPLE_RATE, ConfigError
from pylandmark.corpus.alignment import PhoneSegment, write_alignment
from pylandmark.corpus.audio import write_wav
from pylandmark.corpus.phones import Voicing

# Use package-level logger
logger = logging.getLogger("pylandmark")

_VOICED_STOPS = [("bcl", "b"), ("dcl", "d"), ("gcl", "g")]
_UNVOICED_STOPS = [("pcl", "p"), ("tcl", "t"), ("kcl", "k")]
_VOICED_FRICATIVES = ["v", "dh", "z", "zh"]
_UNVOICED_FRICATIVES = ["f", "th", "s", "sh"]
_VOWELS = ["aa", "iy", "ae", "ah", "eh", "uw"]

_SILENCE = 800  # samples of leading / trailing silence
_VOWEL_RMS = 0.1
_VOICE_BAR_RMS = 0.025
_BURST_RMS = 0.06
_ASPIRATION_RMS = 0.02
_FRICATIVE_NOISE_RMS = 0.05
_VOICED_FRICATIVE_VOICE_RMS = 0.04
_VOICED_FRICATIVE_NOISE_RMS = 0.02


@dataclass(frozen=True)
class SynthSpec:
    n_utterances: int = 20
    tokens_per_utterance: int = 10
    f0_range: tuple[float, float] = (90.0, 220.0)
    snr_db: float = 30.0
    seed: int = 7
    class_ratio: float = 0.5
    stop_fraction: float = 0.5
    formant_scale: float = 1.0
    noise_band_scale: float = 1.0
    ambiguous_fraction: float = 0.0
    corpus_id: str = "synthetic"

    def __post_init__(self):
        if self.n_utterances < 1 or self.tokens_per_utterance < 1:
            raise ConfigError("n_utterances and tokens_per_utterance must be >= 1")
        lo, hi = self.f0_range
        if not 50.0 <= lo <= hi <= 400.0:
            raise ConfigError(f"f0_range must lie within [50, 400] Hz, got {self.f0_range}")
        if not 0.0 < self.class_ratio < 1.0:
            raise ConfigError(f"class_ratio must be in (0, 1), got {self.class_ratio}")
        if not 0.0 <= self.stop_fraction <= 1.0:
            raise ConfigError(f"stop_fraction must be in [0, 1], got {self.stop_fraction}")
        if self.formant_scale <= 0:
            raise ConfigError(f"formant_scale must be positive, got {self.formant_scale}")
        if not 0.5 <= self.noise_band_scale <= 1.5:
            raise ConfigError(f"noise_band_scale must be in [0.5, 1.5], got {self.noise_band_scale}")
        if not 0.0 <= self.ambiguous_fraction < 0.5:
            raise ConfigError(f"ambiguous_fraction must be in [0, 0.5), got {self.ambiguous_fraction}")

    @property
    def n_tokens(self) -> int:
        return self.n_utterances * self.tokens_per_utterance

    @classmethod
    def from_mapping(cls, values: dict[str, str]) -> "SynthSpec":
        known = {f.name: f for f in fields(cls)}
        kwargs: dict = {}
        for key, raw in values.items():
            if key == "f0_range":
                parts = [p for p in raw.replace(",", " ").split() if p]
                if len(parts) != 2:
                    raise ConfigError(f"f0_range needs two numbers, got '{raw}'")
                kwargs[key] = (float(parts[0]), float(parts[1]))
            elif key not in known:
                raise ConfigError(f"unknown synth key '{key}'")
            elif key == "corpus_id":
                kwargs[key] = raw
            elif key in ("n_utterances", "tokens_per_utterance", "seed"):
                kwargs[key] = int(raw)
            else:
                kwargs[key] = float(raw)
        return cls(**kwargs)

    @classmethod
    def from_ini(cls, path: str | Path) -> "SynthSpec":
        parser = configparser.ConfigParser()
        if not parser.read(path):
            raise ConfigError(f"cannot read synth spec {path}")
        if not parser.has_section("synth"):
            raise ConfigError(f"{path}: missing [synth] section")
        return cls.from_mapping(dict(parser.items("synth")))

    @classmethod
    def default(cls) -> "SynthSpec":
        """Bundled 2000-token spec"""
        parser = configparser.ConfigParser()
        parser.read_string(resources.files("pylandmark").joinpath("data/default_synth.ini").read_text(encoding="utf-8"))
        return cls.from_mapping(dict(parser.items("synth")))

    def to_ini(self) -> str:
        lines = ["[synth]"]
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "f0_range":
                value = f"{value[0]:g} {value[1]:g}"
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SynthToken:
    utterance_id: str
    index: int
    phone: str
    manner: str  # "stop" or "fricative"
    voicing: Voicing
    f0: float
    start: float
    end: float
    vot: float  # release duration (stops) or full duration (fricatives)
    ambiguous: bool = False  # realised with the other class's acoustics


@dataclass
class SynthUtterance:
    utterance_id: str
    audio: np.ndarray
    segments: list[PhoneSegment]
    tokens: list[SynthToken]


@dataclass
class SynthCorpus:
    spec: SynthSpec
    utterances: list[SynthUtterance] = field(default_factory=list)
    sample_rate: int = SAMPLE_RATE

    def tokens(self) -> list[SynthToken]:
        return [t for u in self.utterances for t in u.tokens]

    def voiced_fraction(self) -> float:
        tokens = self.tokens()
        return sum(t.voicing is Voicing.VOICED for t in tokens) / len(tokens)


_NOISE_BANDS = {"fricative": (4, 2000.0, 7000.0), "burst": (2, 1000.0, 7000.0), "aspiration": (2, 800.0, 6000.0)}


@lru_cache(maxsize=None)
def _sos(name: str, sample_rate: int, band_scale: float = 1.0) -> np.ndarray:
    """Source filters; band_scale moves the noise bands, the voice bar stays put"""
    if name == "voice_bar":
        return butter(2, 500.0, btype="lowpass", fs=sample_rate, output="sos")
    order, lo, hi = _NOISE_BANDS[name]
    top = 0.49 * sample_rate
    return butter(order, [min(lo * band_scale, 0.8 * top), min(hi * band_scale, top)], btype="bandpass", fs=sample_rate, output="sos")


def pulse_train(f0: float, n: int, sample_rate: int = SAMPLE_RATE, max_freq: float = 4000.0) -> np.ndarray:
    """Band-limited pulse train: equal-amplitude cosine harmonics of f0 up to max_freq"""
    n_harmonics = max(1, int(max_freq // f0))
    phase = 2.0 * np.pi * f0 * np.arange(n) / sample_rate
    harmonics = np.arange(1, n_harmonics + 1)
    return np.cos(np.outer(phase, harmonics)).sum(axis=1) / n_harmonics


def _at_rms(x: np.ndarray, target: float) -> np.ndarray:
    level = float(np.sqrt(np.mean(x * x))) if len(x) else 0.0
    return x * (target / level) if level > 0 else x


def _resonator(freq: float, bandwidth: float, sample_rate: int) -> tuple[np.ndarray, np.ndarray]:
    r = np.exp(-np.pi * bandwidth / sample_rate)
    c = 2.0 * r * np.cos(2.0 * np.pi * freq / sample_rate)
    return np.array([1.0 - c + r * r]), np.array([1.0, -c, r * r])


def two_resonator_vowel(
    source: np.ndarray,
    f1_start: float,
    f1_target: float,
    f2: float,
    sample_rate: int = SAMPLE_RATE,
    transition_s: float = 0.030,
    block: int = 80,
) -> np.ndarray:
    """Cascade of two resonators; F1 moves linearly from f1_start to f1_target over transition_s"""
    out = np.zeros(len(source))
    zi1 = np.zeros(2)
    zi2 = np.zeros(2)
    b2, a2 = _resonator(f2, 120.0, sample_rate)
    for b0 in range(0, len(source), block):
        t = b0 / sample_rate
        f1 = f1_target if t >= transition_s else f1_start + (f1_target - f1_start) * t / transition_s
        b1, a1 = _resonator(f1, 90.0, sample_rate)
        y, zi1 = lfilter(b1, a1, source[b0 : b0 + block], zi=zi1)
        out[b0 : b0 + block], zi2 = lfilter(b2, a2, y, zi=zi2)
    return out


class _UtteranceBuilder:
    def __init__(self, utterance_id: str, sample_rate: int):
        self.utterance_id = utterance_id
        self.sample_rate = sample_rate
        self.pieces: list[np.ndarray] = []
        self.segments: list[PhoneSegment] = []
        self.n = 0

    def add(self, label: str, samples: np.ndarray) -> PhoneSegment:
        seg = PhoneSegment(label, self.n / self.sample_rate, (self.n + len(samples)) / self.sample_rate, self.utterance_id)
        self.pieces.append(samples)
        self.segments.append(seg)
        self.n += len(samples)
        return seg

    def audio(self) -> np.ndarray:
        return np.concatenate(self.pieces)


def _add_token(builder: _UtteranceBuilder, rng: np.random.Generator, spec: SynthSpec, voiced: bool, index: int, ambiguous: bool = False) -> SynthToken:
    """Append one obstruent + vowel; the phone follows the label, the acoustics follow voiced != ambiguous"""
    sr = builder.sample_rate
    label_voiced = voiced
    voiced = voiced != ambiguous
    band = spec.noise_band_scale
    f0 = float(rng.uniform(*spec.f0_range))
    is_stop = bool(rng.random() < spec.stop_fraction)
    vowel = _VOWELS[int(rng.integers(len(_VOWELS)))]

    if is_stop:
        closure_phone, release_phone = (_VOICED_STOPS if label_voiced else _UNVOICED_STOPS)[int(rng.integers(3))]
        n_closure = int(rng.integers(640, 1121))
        n_release = int(rng.integers(160, 401)) if voiced else int(rng.integers(800, 1441))
        n_burst = min(int(rng.integers(160, 321)), n_release)
        n_fric = 0
    else:
        fric_phone = (_VOICED_FRICATIVES if label_voiced else _UNVOICED_FRICATIVES)[int(rng.integers(4))]
        n_fric = int(rng.integers(1280, 2241))
        n_closure = n_release = n_burst = 0
    n_vowel = int(rng.integers(1280, 2401))
    f1_target = float(rng.uniform(550.0, 800.0)) * spec.formant_scale
    f2 = float(rng.uniform(1100.0, 1800.0)) * spec.formant_scale
    f1_start = 300.0 * spec.formant_scale if voiced else 0.9 * f1_target

    n_obstruent = n_closure + n_release + n_fric
    source = pulse_train(f0, n_obstruent + n_vowel, sr)
    voice_bar = sosfilt(_sos("voice_bar", sr), source[:n_obstruent]) if n_obstruent else np.zeros(0)

    if is_stop:
        closure = _at_rms(voice_bar[:n_closure], _VOICE_BAR_RMS) if voiced else np.zeros(n_closure)
        release = np.zeros(n_release)
        envelope = np.exp(-np.arange(n_burst) / (0.3 * n_burst))
        release[:n_burst] = _at_rms(sosfilt(_sos("burst", sr, band), rng.standard_normal(n_burst)), _BURST_RMS) * envelope
        tail = n_release - n_burst
        if tail > 0:
            if voiced:
                release[n_burst:] = _at_rms(voice_bar[n_closure + n_burst :], _VOICE_BAR_RMS)
            else:
                release[n_burst:] = _at_rms(sosfilt(_sos("aspiration", sr, band), rng.standard_normal(tail)), _ASPIRATION_RMS)
        first = builder.add(closure_phone, closure)
        last = builder.add(release_phone, release)
        phone, manner, vot = release_phone, "stop", last.duration
    else:
        noise = sosfilt(_sos("fricative", sr, band), rng.standard_normal(n_fric))
        if voiced:
            fric = _at_rms(voice_bar, _VOICED_FRICATIVE_VOICE_RMS) + _at_rms(noise, _VOICED_FRICATIVE_NOISE_RMS)
        else:
            fric = _at_rms(noise, _FRICATIVE_NOISE_RMS)
        first = last = builder.add(fric_phone, fric)
        phone, manner, vot = fric_phone, "fricative", last.duration

    vowel_audio = two_resonator_vowel(source[n_obstruent:], f1_start, f1_target, f2, sr)
    onset = min(80, n_vowel)
    vowel_audio[:onset] *= np.linspace(0.0, 1.0, onset, endpoint=False)
    builder.add(vowel, _at_rms(vowel_audio, _VOWEL_RMS))

    return SynthToken(
        utterance_id=builder.utterance_id,
        index=index,
        phone=phone,
        manner=manner,
        voicing=Voicing.VOICED if label_voiced else Voicing.UNVOICED,
        f0=f0,
        start=first.start,
        end=last.end,
        vot=vot,
        ambiguous=ambiguous,
    )


def synthesize_corpus(spec: SynthSpec, sample_rate: int = SAMPLE_RATE) -> SynthCorpus:
    """Deterministic given spec.seed; voiced and ambiguous token counts are round(fraction * n_tokens) exactly"""
    rng = np.random.default_rng(spec.seed)
    n_voiced = int(round(spec.class_ratio * spec.n_tokens))
    voiced_flags = rng.permutation(np.array([True] * n_voiced + [False] * (spec.n_tokens - n_voiced)))
    n_ambiguous = int(round(spec.ambiguous_fraction * spec.n_tokens))
    ambiguous_flags = np.zeros(spec.n_tokens, dtype=bool)
    if n_ambiguous:
        ambiguous_flags[rng.choice(spec.n_tokens, n_ambiguous, replace=False)] = True
    noise_std = _VOWEL_RMS * 10.0 ** (-spec.snr_db / 20.0)

    corpus = SynthCorpus(spec, sample_rate=sample_rate)
    for u in range(spec.n_utterances):
        builder = _UtteranceBuilder(f"{spec.corpus_id}_{u:04d}", sample_rate)
        builder.add("sil", np.zeros(_SILENCE))
        tokens = []
        for t in range(spec.tokens_per_utterance):
            k = u * spec.tokens_per_utterance + t
            tokens.append(_add_token(builder, rng, spec, bool(voiced_flags[k]), t, bool(ambiguous_flags[k])))
        builder.add("sil", np.zeros(_SILENCE))

        audio = builder.audio() + noise_std * rng.standard_normal(builder.n)
        peak = float(np.max(np.abs(audio)))
        if peak > 0.95:
            audio *= 0.95 / peak
        corpus.utterances.append(SynthUtterance(builder.utterance_id, audio, builder.segments, tokens))
    logger.info(f"Synthesized corpus '{spec.corpus_id}': {spec.n_utterances} utterances, {spec.n_tokens} tokens ({n_voiced} voiced, {n_ambiguous} ambiguous)")
    return corpus


TRUTH_HEADER = ["utterance_id", "token", "phone", "manner", "voicing", "f0", "start", "end", "vot", "ambiguous"]


def write_synth_corpus(corpus: SynthCorpus, out_dir: str | Path) -> Path:
    """Write audio/*.wav, alignments/*.phn, truth.csv and the generating spec"""
    out_dir = Path(out_dir)
    (out_dir / "audio").mkdir(parents=True, exist_ok=True)
    (out_dir / "alignments").mkdir(parents=True, exist_ok=True)
    for utt in corpus.utterances:
        write_wav(out_dir / "audio" / f"{utt.utterance_id}.wav", utt.audio, corpus.sample_rate)
        (out_dir / "alignments" / f"{utt.utterance_id}.phn").write_text(write_alignment(utt.segments, corpus.sample_rate), encoding="utf-8")
    with open(out_dir / "truth.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRUTH_HEADER)
        for t in corpus.tokens():
            writer.writerow([t.utterance_id, t.index, t.phone, t.manner, t.voicing.value, f"{t.f0:.6f}", f"{t.start:.6f}", f"{t.end:.6f}", f"{t.vot:.6f}", int(t.ambiguous)])
    (out_dir / "synth.ini").write_text(corpus.spec.to_ini(), encoding="utf-8")
    return out_dir
