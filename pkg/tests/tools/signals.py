"""Test signal generators and small synthetic corpora"""

from pathlib import Path

import numpy as np

from pylandmark.corpus.synth import SynthSpec, synthesize_corpus, write_synth_corpus

SR = 16000
FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
TOY_CORPUS = FIXTURES / "toy_corpus"


def tone(freq: float, n: int, sample_rate: int = SR, amplitude: float = 1.0) -> np.ndarray:
    return amplitude * np.sin(2.0 * np.pi * freq * np.arange(n) / sample_rate)


def white_noise(n: int, seed: int = 0, scale: float = 1.0) -> np.ndarray:
    return scale * np.random.default_rng(seed).standard_normal(n)


def impulse_train(f0: float, n: int, sample_rate: int = SR) -> np.ndarray:
    out = np.zeros(n)
    period = sample_rate / f0
    out[np.round(np.arange(0, n, period)).astype(int).clip(0, n - 1)] = 1.0
    return out


def small_spec(corpus_id: str = "synth_small", n_utterances: int = 6, seed: int = 7, **kwargs) -> SynthSpec:
    """A few hundred milliseconds per utterance; fast enough for unit tests"""
    return SynthSpec(n_utterances=n_utterances, tokens_per_utterance=kwargs.pop("tokens_per_utterance", 4), seed=seed, corpus_id=corpus_id, **kwargs)


def write_small_corpus(root: Path, corpus_id: str = "synth_small", **kwargs) -> Path:
    corpus = synthesize_corpus(small_spec(corpus_id, **kwargs))
    return write_synth_corpus(corpus, root / corpus_id)
