#!/usr/bin/env python3
"""Test INI configuration loading and per-stage run manifests"""

import json
from pathlib import Path

import pytest

from pylandmark.common import ConfigError, DataError, StaleInputError
from pylandmark.config import PipelineConfig, to_bool, to_list
from pylandmark.features import FeatureVariant
from pylandmark.manifest import MANIFEST_NAME, RunManifest, check_upstream, sha256_file
from pylandmark.models import ModelFamily

CONFIG_TEXT = """
[run]
seed = 11
jobs = 2

[corpus]
roots = corpora/english,
        corpora/spanish_like

[features]
variant = mc39_region
include_f2 = yes

[model]
family = cnn
gamma =

[train]
max_epochs = 40
learning_rate = 0.0005
"""


def test_load_ini(tmp_path):
    path = tmp_path / "pipeline.ini"
    path.write_text(CONFIG_TEXT)
    config = PipelineConfig.load(path)
    assert config.seed == 11 and config.jobs == 2
    assert config.corpora == ["corpora/english", "corpora/spanish_like"]
    assert config.variant is FeatureVariant.MC39_REGION
    assert config.include_f2 is True
    assert config.family is ModelFamily.CNN
    assert config.svm_gamma is None
    assert config.max_epochs == 40

    train = config.train_config()
    assert train.seed == 11 and train.learning_rate == 0.0005
    assert config.feature_settings().dim(FeatureVariant.CUES) == 9
    config.validate()
    print("[OK] INI config loaded")


def test_empty_value_keeps_default(tmp_path):
    path = tmp_path / "pipeline.ini"
    path.write_text("[run]\nseed =\n[train]\npatience =\n")
    config = PipelineConfig.load(path)
    assert config.seed == 0 and config.patience == 10


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        PipelineConfig.load(tmp_path / "missing.ini")

    path = tmp_path / "bad.ini"
    path.write_text("[features]\nwindow = 20\n")
    with pytest.raises(ConfigError, match=r"unknown config option \[features\] window"):
        PipelineConfig.load(path)

    path.write_text("[train]\nmax_epochs = many\n")
    with pytest.raises(ConfigError):
        PipelineConfig.load(path)

    path.write_text("no section header\n")
    with pytest.raises(ConfigError):
        PipelineConfig.load(path)

    with pytest.raises(ConfigError):
        PipelineConfig(jobs=0).validate()
    with pytest.raises(ConfigError):
        PipelineConfig(phone_map_path=tmp_path / "none.phonemap").validate()
    with pytest.raises(ConfigError):
        PipelineConfig(dev_fraction=0.7).validate()


def test_converters():
    assert to_bool(" On ") is True and to_bool("0") is False
    with pytest.raises(ValueError):
        to_bool("maybe")
    assert to_list("a, b,\n c,,") == ["a", "b", "c"]


def test_override_applies_only_given_values():
    config = PipelineConfig(seed=3, jobs=4)
    updated = config.override(seed=9, jobs=None, out=Path("elsewhere"))
    assert updated.seed == 9 and updated.jobs == 4 and updated.out == Path("elsewhere")
    assert config.seed == 3


def test_digest_ignores_run_options():
    base = PipelineConfig()
    assert base.digest() == PipelineConfig(jobs=8, out=Path("x"), verbose=True).digest()
    assert base.digest() != PipelineConfig(n_ceps=12).digest()
    # feature-only hash is blind to training options
    assert base.digest("features", "dsp") == PipelineConfig(max_epochs=5).digest("features", "dsp")
    assert base.digest("features", "dsp") != PipelineConfig(f0_max=500.0).digest("features", "dsp")
    assert json.dumps(base.to_dict())


def test_example_pipeline_config_loads():
    config = PipelineConfig.load(Path(__file__).resolve().parents[2] / "example_config" / "pipeline.ini")
    assert config.octave_ratio == 0.9 and config.pitch_config().octave_ratio == 0.9
    assert config.reference is None
    assert len(config.corpora) == 3


def test_evaluate_reference_option(tmp_path):
    path = tmp_path / "pipeline.ini"
    path.write_text("[evaluate]\nreference = lang_a_test\n[dsp]\noctave_ratio = 0.8\n")
    config = PipelineConfig.load(path)
    assert config.reference == "lang_a_test"
    assert config.pitch_config().octave_ratio == 0.8


def _stage(tmp_path: Path) -> tuple[Path, Path]:
    source = tmp_path / "in.txt"
    source.write_text("input")
    out_dir = tmp_path / "stage"
    out_dir.mkdir()
    (out_dir / "a.lm").write_text("0.1000\tFc\n")
    (out_dir / "b.lm").write_text("0.2000\tFr\n")
    manifest = RunManifest("landmarks", "abc123", parameters={"count": 2})
    manifest.add_inputs([source])
    manifest.add_outputs(out_dir, sorted(out_dir.glob("*.lm")))
    manifest.write(out_dir)
    return source, out_dir


def test_manifest_write_and_load(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    source, out_dir = _stage(tmp_path)
    loaded = RunManifest.load(out_dir)
    assert loaded.stage == "landmarks" and loaded.config_hash == "abc123"
    assert loaded.outputs == {"a.lm": sha256_file(out_dir / "a.lm"), "b.lm": sha256_file(out_dir / "b.lm")}
    assert loaded.inputs == {source.as_posix(): sha256_file(source)}
    assert loaded.parameters == {"count": 2}
    assert loaded.created == "1970-01-01T00:00:00Z"
    assert set(loaded.versions) == {"pylandmark", "numpy", "scipy", "soundfile"}
    assert loaded.stale_outputs(out_dir) == []


def test_manifest_without_build_date_is_reproducible(tmp_path, monkeypatch):
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    _, out_dir = _stage(tmp_path)
    first = (out_dir / MANIFEST_NAME).read_bytes()
    assert "created" not in json.loads(first)
    assert RunManifest.load(out_dir).created == ""

    RunManifest.load(out_dir).write(out_dir)
    assert (out_dir / MANIFEST_NAME).read_bytes() == first


def test_manifest_missing_or_corrupt(tmp_path):
    with pytest.raises(DataError, match="run the upstream stage first"):
        RunManifest.load(tmp_path)
    (tmp_path / MANIFEST_NAME).write_text("{")
    with pytest.raises(DataError):
        RunManifest.load(tmp_path)


def test_check_upstream_detects_stale_outputs(tmp_path):
    _, out_dir = _stage(tmp_path)
    assert check_upstream(out_dir).stage == "landmarks"

    (out_dir / "a.lm").write_text("0.1001\tFc\n")
    (out_dir / "b.lm").unlink()
    with pytest.raises(StaleInputError) as exc:
        check_upstream(out_dir)
    assert "2 landmarks output(s)" in str(exc.value)
    assert exc.value.exit_code == 2

    manifest = check_upstream(out_dir, force=True)
    assert sorted(manifest.stale_outputs(out_dir)) == ["a.lm", "b.lm"]


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
