#!/usr/bin/env python3
"""Test cue vectors, MFCC / raw inputs, the standardizer and feature tables"""

from dataclasses import replace

import numpy as np
import pytest

from pylandmark.common import DataError, DimensionError
from pylandmark.corpus import Landmark, LandmarkRegion, LandmarkType, PhoneClassMap, PhoneSegment, SynthSpec, Voicing, derive_landmarks, extract_regions, synthesize_corpus
from pylandmark.corpus.synth import pulse_train, two_resonator_vowel
from pylandmark.dsp import MfccConfig, mel_filterbank, mfcc_frames
from pylandmark.features.cues import formant_slopes
from pylandmark.features import (
    CUE_NAMES,
    CueConfig,
    FeatureRow,
    FeatureSettings,
    FeatureTable,
    FeatureVariant,
    Standardizer,
    extract_utterance_features,
    fit_standardizer,
    manual_cues,
    mfcc_features,
    neighbours,
    raw_nn_input,
)
from ..tools.signals import SR, tone, white_noise

PHONES = PhoneClassMap.default()


def _region(samples: np.ndarray, segment: PhoneSegment, kind: LandmarkType = LandmarkType.FC) -> LandmarkRegion:
    time = segment.end if kind.is_release else segment.start
    landmark = Landmark(time, kind, segment)
    bounds = (time - 0.02, time) if kind.is_release else (time, time + 0.02)
    return LandmarkRegion(samples, landmark, PHONES.voicing(segment.label), bounds, context=np.zeros(512))


def _fricative_regions():
    """Fc regions of the first voiced and first unvoiced fricative token, with their utterance"""
    corpus = synthesize_corpus(SynthSpec(n_utterances=2, tokens_per_utterance=6, stop_fraction=0.0, seed=21))
    found = {}
    for utt in corpus.utterances:
        for region in extract_regions(utt.audio, utt.segments, derive_landmarks(utt.segments, PHONES), PHONES, SR):
            if region.landmark.kind is LandmarkType.FC and region.label not in found:
                found[region.label] = (region, utt)
    return found[Voicing.VOICED], found[Voicing.UNVOICED]


def test_variant_names_and_dimensions():
    assert FeatureVariant.from_name("mc39_region") is FeatureVariant.MC39_REGION
    assert FeatureVariant.from_name(" FB40 ") is FeatureVariant.FB40
    with pytest.raises(ValueError):
        FeatureVariant.from_name("MC26")

    dims = {v: v.dim() for v in FeatureVariant}
    assert dims == {
        FeatureVariant.CUES: 8,
        FeatureVariant.MC13_WHOLE: 13,
        FeatureVariant.MC13_REGION: 13,
        FeatureVariant.MC39_WHOLE: 39,
        FeatureVariant.MC39_REGION: 39,
        FeatureVariant.FFT1024: 513,
        FeatureVariant.FB40: 40,
    }
    assert FeatureVariant.CUES.dim(include_f2=True) == 9
    assert len(CUE_NAMES) == 8


def test_voiced_and_unvoiced_fricative_cues():
    (voiced, v_utt), (unvoiced, u_utt) = _fricative_regions()

    v = manual_cues(voiced, voiced.segment, None, v_utt.audio)
    u = manual_cues(unvoiced, unvoiced.segment, None, u_utt.audio)
    print(f"voiced pncc={v.pncc:.3f} h1={v.h1:.4f}  unvoiced pncc={u.pncc:.3f} h1={u.h1:.4f}")

    assert v.pncc > 0.5 and v.h1 > 0.0
    assert u.pncc < 0.3 and u.h1 == 0.0
    # the voice bar puts low-frequency energy into voiced fricatives
    assert v.e_ratio > u.e_ratio
    assert len(v) == 8 and v.as_array().shape == (8,)


def test_silent_region_gives_degenerate_cues():
    segment = PhoneSegment("s", 0.10, 0.18)
    audio = np.zeros(4800)
    cues = manual_cues(_region(np.zeros(320), segment), segment, None, audio)
    assert cues.as_array().tolist() == pytest.approx([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.08, 0.0])


def test_vot_cue_follows_release_duration():
    audio = white_noise(6400, seed=3, scale=0.01)
    for release_end, expected in ((0.12, 0.020), (0.17, 0.070)):
        closure = PhoneSegment("tcl", 0.05, 0.10)
        release = PhoneSegment("t", 0.10, release_end)
        vowel = PhoneSegment("aa", release_end, 0.35)
        segments = [PhoneSegment("h#", 0.0, 0.05), closure, release, vowel]
        assert neighbours(segments, closure, PHONES) == (release, vowel)
        assert neighbours(segments, release, PHONES) == (None, vowel)

        sc = _region(audio[800:1120], closure, LandmarkType.SC)
        cues = manual_cues(sc, closure, vowel, audio, release_segment=release)
        assert cues.vot == pytest.approx(expected)


def test_cues_under_amplitude_scaling():
    (voiced, utt), _ = _fricative_regions()
    gain = 2.0
    louder = replace(voiced, samples=gain * voiced.samples, context=None if voiced.context is None else gain * voiced.context)
    base = manual_cues(voiced, voiced.segment, None, utt.audio)
    scaled = manual_cues(louder, voiced.segment, None, gain * utt.audio)

    assert scaled.pncc == pytest.approx(base.pncc, rel=1e-9)
    assert scaled.e_ratio == pytest.approx(base.e_ratio, rel=1e-6)
    assert scaled.rms == pytest.approx(gain * base.rms, rel=1e-9)
    assert scaled.h1 == pytest.approx(gain * base.h1, rel=1e-9)
    assert scaled.e1 == pytest.approx(gain**2 * base.e1, rel=1e-9)
    assert scaled.e2 == pytest.approx(gain**2 * base.e2, rel=1e-9)
    assert scaled.vot == base.vot


def test_vowel_before_the_obstruent_is_the_fallback_neighbour():
    vowel = PhoneSegment("aa", 0.0, 0.10)
    fricative = PhoneSegment("s", 0.10, 0.18)
    closure = PhoneSegment("tcl", 0.10, 0.15)
    release = PhoneSegment("t", 0.15, 0.18)
    assert neighbours([vowel, fricative, PhoneSegment("h#", 0.18, 0.30)], fricative, PHONES) == (None, vowel)
    assert neighbours([vowel, closure, release, PhoneSegment("h#", 0.18, 0.30)], closure, PHONES) == (release, vowel)
    assert neighbours([PhoneSegment("h#", 0.0, 0.10), fricative], fricative, PHONES) == (None, None)


def test_formant_slope_is_measured_on_the_vowel_side():
    rising = two_resonator_vowel(pulse_train(120.0, 4800, SR), 300.0, 700.0, 1200.0, SR)
    vowel = PhoneSegment("aa", 0.0, 0.30)
    config = CueConfig()

    f1_into, _ = formant_slopes(rising, vowel, config, following=True)
    # reversed audio: F1 falls towards the end of a vowel that precedes the consonant
    f1_out, _ = formant_slopes(rising[::-1].copy(), vowel, config, following=False)
    print(f"[OK] F1 slope after onset {f1_into:.0f} Hz/s, before offset {f1_out:.0f} Hz/s")
    assert f1_into > 0.0
    assert f1_out < 0.0


def test_f1_transition_rises_after_voiced_obstruents():
    corpus = synthesize_corpus(SynthSpec(n_utterances=3, tokens_per_utterance=6, seed=5, snr_db=40.0))
    slopes = {Voicing.VOICED: [], Voicing.UNVOICED: []}
    for utt in corpus.utterances:
        rows = extract_utterance_features(utt.utterance_id, utt.audio, utt.segments, PHONES, FeatureVariant.CUES)
        for row in rows:
            slopes[row.label].append(row.values[CUE_NAMES.index("formant_transition")])
    assert np.median(slopes[Voicing.VOICED]) > np.median(slopes[Voicing.UNVOICED])


def test_include_f2_adds_a_ninth_cue():
    corpus = synthesize_corpus(SynthSpec(n_utterances=1, tokens_per_utterance=2, seed=2))
    utt = corpus.utterances[0]
    settings = FeatureSettings(cues=CueConfig(include_f2=True))
    rows = extract_utterance_features(utt.utterance_id, utt.audio, utt.segments, PHONES, FeatureVariant.CUES, settings=settings)
    assert settings.dim(FeatureVariant.CUES) == 9
    assert all(len(r.values) == 9 for r in rows)


def test_mfcc_region_is_mean_of_three_frames():
    audio = white_noise(3200, seed=1)
    segment = PhoneSegment("s", 0.05, 0.15)
    region = _region(audio[800:1120], segment)
    values = mfcc_features(audio, segment, region, FeatureVariant.MC13_REGION)
    frames = mfcc_frames(audio[800:1120], MfccConfig())
    assert frames.shape[0] == 3
    assert np.allclose(values, frames.mean(axis=0))


def test_mfcc39_on_constant_audio_has_zero_deltas():
    audio = np.full(3200, 0.2)
    segment = PhoneSegment("z", 0.05, 0.15)
    values = mfcc_features(audio, segment, _region(audio[800:1120], segment), FeatureVariant.MC39_WHOLE)
    assert values.shape == (39,)
    assert np.allclose(values[13:], 0.0)


def test_mfcc39_starts_with_the_mfcc13_statics():
    audio = white_noise(3200, seed=8) + tone(500.0, 3200)
    segment = PhoneSegment("z", 0.05, 0.15)
    region = _region(audio[800:1120], segment)
    for mc13, mc39 in ((FeatureVariant.MC13_REGION, FeatureVariant.MC39_REGION), (FeatureVariant.MC13_WHOLE, FeatureVariant.MC39_WHOLE)):
        statics = mfcc_features(audio, segment, region, mc13)
        full = mfcc_features(audio, segment, region, mc39)
        assert np.allclose(full[:13], statics, rtol=0.0, atol=1e-12)


def test_mfcc_whole_phone_differs_from_region_on_a_chirp():
    t = np.arange(3200) / SR
    audio = np.sin(2.0 * np.pi * (300.0 + 20000.0 * t) * t)
    segment = PhoneSegment("s", 0.05, 0.15)
    region = _region(audio[800:1120], segment)
    whole = mfcc_features(audio, segment, region, FeatureVariant.MC13_WHOLE)
    local = mfcc_features(audio, segment, region, FeatureVariant.MC13_REGION)
    assert not np.allclose(whole, local)

    with pytest.raises(ValueError):
        mfcc_features(audio, segment, region, FeatureVariant.FB40)


def test_raw_inputs():
    segment = PhoneSegment("s", 0.05, 0.15)
    silent = _region(np.zeros(320), segment)
    assert not raw_nn_input(silent, FeatureVariant.FFT1024).values.any()
    assert np.allclose(raw_nn_input(silent, FeatureVariant.FB40).values, np.log(1e-10))

    region = _region(tone(1000.0, 320), segment)
    fft = raw_nn_input(region, FeatureVariant.FFT1024)
    assert fft.values.shape == (513,)
    assert int(np.argmax(fft.values)) == 64

    fb = raw_nn_input(region, FeatureVariant.FB40)
    assert fb.values.shape == (40,)
    centers = mel_filterbank(40, 1024, SR).centers
    assert int(np.argmax(fb.values)) == int(np.argmin(np.abs(centers - 1000.0)))

    with pytest.raises(ValueError):
        raw_nn_input(region, FeatureVariant.CUES)


def test_standardizer():
    s = fit_standardizer(np.array([[0.0], [2.0]]))
    assert s.mean.tolist() == [1.0] and s.std.tolist() == [1.0]
    assert s.apply(np.array([4.0])).tolist() == [3.0]

    train = white_noise(300, seed=2).reshape(100, 3) * [1.0, 5.0, 0.01] + [3.0, -2.0, 7.0]
    s = Standardizer.fit(train)
    assert np.all(np.abs(s.apply(train).mean(axis=0)) < 1e-10)
    assert Standardizer.from_dict(s.to_dict()).apply(train) == pytest.approx(s.apply(train))

    constant = Standardizer.fit(np.ones((5, 2)))
    assert np.all(np.isfinite(constant.apply(np.ones((1, 2)))))

    with pytest.raises(DimensionError):
        s.apply(np.zeros((2, 4)))
    with pytest.raises(DataError):
        Standardizer.fit(np.zeros((1, 3)))


def test_feature_table_csv(tmp_path):
    table = FeatureTable(FeatureVariant.MC13_REGION, "english", 13)
    rng = np.random.default_rng(0)
    table.add(FeatureRow("u1", 0.1916, "Fc", Voicing.UNVOICED, rng.standard_normal(13)))
    table.add(FeatureRow("u1", 0.45, "Sr", Voicing.VOICED, rng.standard_normal(13)))
    with pytest.raises(DimensionError):
        table.add(FeatureRow("u1", 0.5, "Fr", Voicing.VOICED, np.zeros(8)))

    path = tmp_path / "MC13_region.csv"
    table.write_csv(path)
    assert path.read_text().splitlines()[0] == "# dim=13 variant=MC13_region corpus=english"

    loaded = FeatureTable.read_csv(path)
    assert loaded.variant is FeatureVariant.MC13_REGION and loaded.corpus_id == "english"
    assert np.array_equal(loaded.matrix(), table.matrix())
    assert loaded.labels().tolist() == [0, 1]

    path.write_text("dim=13\n")
    with pytest.raises(DataError):
        FeatureTable.read_csv(path)


def test_extract_utterance_features_row_counts():
    corpus = synthesize_corpus(SynthSpec(n_utterances=1, tokens_per_utterance=4, seed=4))
    utt = corpus.utterances[0]
    n_regions = len(extract_regions(utt.audio, utt.segments, derive_landmarks(utt.segments, PHONES), PHONES, SR))
    assert n_regions == 2 * len(utt.tokens)
    for variant in FeatureVariant:
        rows = extract_utterance_features(utt.utterance_id, utt.audio, utt.segments, PHONES, variant)
        assert len(rows) == n_regions, variant
        assert {len(r.values) for r in rows} == {variant.dim()}, variant
        assert all(np.all(np.isfinite(r.values)) for r in rows), variant
        assert [r.label for r in rows[:2]] == [utt.tokens[0].voicing] * 2


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
