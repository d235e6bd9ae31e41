import atexit
import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from pylandmark.common import DataError, VariantMismatchError
from pylandmark.config import PipelineConfig
from pylandmark.corpus.corpus import Corpus, Utterance
from pylandmark.corpus.landmarks import Landmark, read_landmark_file, write_landmark_file
from pylandmark.corpus.synth import SynthSpec, synthesize_corpus, write_synth_corpus
from pylandmark.evaluation import EvalReport, bar_chart_rows, comparison_csv, comparison_text, cross_lingual_report, csv_text, read_report_csv
from pylandmark.features.extraction import extract_utterance_features
from pylandmark.features.table import FeatureRow, FeatureTable
from pylandmark.features.variants import FeatureVariant
from pylandmark.manifest import MANIFEST_NAME, RunManifest, check_upstream, sha256_file
from pylandmark.models.artifact import ModelArtifact, ModelFamily, load_model, save_model
from pylandmark.models.training import train, write_training_log

# Use package-level logger
logger = logging.getLogger("pylandmark")

_TIME_TOLERANCE = 0.5e-4 + 1e-9


def corpus_id_of(corpus: str | Path) -> str:
    """Corpora are named by their directory; a bare id names the same workspace entry"""
    return Path(corpus).name


def model_name(family: ModelFamily, variant: FeatureVariant) -> str:
    return f"{family}_{variant}"


class Pipeline:
    """Runs the pipeline stages against one workspace directory

    Per-utterance work fans out over a thread pool sized by ``config.jobs``;
    results are gathered in utterance-id order so outputs never depend on
    the pool size.
    """

    def __init__(self, config: PipelineConfig | None = None):
        self.config = config or PipelineConfig()
        self.config.validate()
        self.workspace = Path(self.config.out)
        self.phone_map = self.config.phone_map()

        # verbose=True -> DEBUG, otherwise WARNING
        if self.config.verbose:
            logger.setLevel(logging.DEBUG)
        else:
            logger.setLevel(logging.WARNING)

        self._executor = ThreadPoolExecutor(max_workers=self.config.jobs)
        self._stopped = False
        atexit.register(self.stop)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()
        return False

    def stop(self) -> None:
        """Shut the worker pool down; safe to call more than once"""
        if self._stopped:
            return
        self._stopped = True
        try:
            self._executor.shutdown(wait=True, cancel_futures=True)
        except Exception:
            pass

    # -- paths -------------------------------------------------------------

    def landmark_dir(self, corpus_id: str) -> Path:
        return self.workspace / corpus_id / "landmarks"

    def feature_dir(self, corpus_id: str) -> Path:
        return self.workspace / corpus_id / "features"

    def feature_path(self, corpus_id: str, variant: FeatureVariant) -> Path:
        return self.feature_dir(corpus_id) / f"{variant}.csv"

    @property
    def model_dir(self) -> Path:
        return self.workspace / "models"

    @property
    def report_dir(self) -> Path:
        return self.workspace / "reports"

    def load_corpus(self, root: str | Path) -> Corpus:
        root = Path(root)
        if not root.is_dir():
            raise DataError(f"corpus directory {root} does not exist")
        corpus = Corpus.load(root, self.phone_map, alignment_dir=self.config.alignment_dir, audio_dir=self.config.audio_dir, sample_rate=self.config.sample_rate)
        corpus.check_phones()
        return corpus

    # -- stages ------------------------------------------------------------

    def synth(self, spec: SynthSpec, out_root: str | Path | None = None) -> Path:
        out_dir = Path(out_root or self.workspace) / spec.corpus_id
        corpus = synthesize_corpus(spec, self.config.sample_rate)
        write_synth_corpus(corpus, out_dir)
        manifest = RunManifest("synth", _text_digest(spec.to_ini()), parameters={"corpus_id": spec.corpus_id, "n_tokens": spec.n_tokens})
        manifest.add_outputs(out_dir, [p for p in out_dir.rglob("*") if p.is_file() and p.name != MANIFEST_NAME])
        manifest.write(out_dir)
        logger.info(f"Wrote synthetic corpus to {out_dir}")
        return out_dir

    def landmarks(self, root: str | Path) -> Path:
        corpus = self.load_corpus(root)
        out_dir = self.landmark_dir(corpus.corpus_id)
        out_dir.mkdir(parents=True, exist_ok=True)

        def write_one(utt: Utterance) -> tuple[Path, int]:
            landmarks = utt.landmarks(self.phone_map)
            path = out_dir / f"{utt.utterance_id}.lm"
            path.write_text(write_landmark_file(landmarks), encoding="utf-8")
            return path, len(landmarks)

        results = list(self._executor.map(write_one, corpus.get_utterances()))
        distribution = corpus.class_distribution()
        manifest = RunManifest(
            "landmarks",
            self.config.digest("corpus"),
            parameters={
                "corpus_id": corpus.corpus_id,
                "phone_map": self.phone_map.name,
                "n_utterances": len(results),
                "n_landmarks": sum(n for _, n in results),
                "class_distribution": {str(k): v for k, v in distribution.items()},
            },
        )
        manifest.add_inputs(u.alignment_path for u in corpus.get_utterances() if u.alignment_path)
        manifest.add_outputs(out_dir, [p for p, _ in results])
        manifest.write(out_dir)
        logger.info(f"{corpus.corpus_id}: wrote {len(results)} landmark files")
        return out_dir

    def _checked_landmarks(self, utt: Utterance, lm_dir: Path) -> list[Landmark]:
        """Landmarks derived from the alignment, after checking them against the landmark file"""
        derived = utt.landmarks(self.phone_map)
        path = lm_dir / f"{utt.utterance_id}.lm"
        if not path.is_file():
            raise DataError(f"missing landmark file {path}; run 'landmarks' first")
        stored = read_landmark_file(path.read_text(encoding="utf-8"))
        if len(stored) != len(derived) or any(a.kind is not b.kind or abs(a.time - b.time) > _TIME_TOLERANCE for a, b in zip(stored, derived)):
            raise DataError(f"{path} does not match the alignment of '{utt.utterance_id}'; rerun 'landmarks'")
        return derived

    def extract(self, root: str | Path, variant: FeatureVariant | None = None) -> Path:
        variant = variant or self.config.variant
        corpus = self.load_corpus(root)
        lm_dir = self.landmark_dir(corpus.corpus_id)
        check_upstream(lm_dir, self.config.force)
        settings = self.config.feature_settings()

        def extract_one(utt: Utterance) -> list[FeatureRow]:
            landmarks = self._checked_landmarks(utt, lm_dir)
            return extract_utterance_features(utt.utterance_id, utt.audio(), utt.segments, self.phone_map, variant, landmarks, settings, corpus.sample_rate)

        utterances = corpus.get_utterances()
        table = FeatureTable(variant, corpus.corpus_id, settings.dim(variant))
        for rows in self._executor.map(extract_one, utterances):
            for row in rows:
                table.add(row)

        out_dir = self.feature_dir(corpus.corpus_id)
        out_dir.mkdir(parents=True, exist_ok=True)
        out_path = self.feature_path(corpus.corpus_id, variant)
        table.write_csv(out_path)

        manifest = _load_or_new(out_dir, "extract", self.config.digest("corpus", "features", "dsp"))
        manifest.parameters[variant.value] = {"rows": len(table), "dim": table.dim, "config_hash": self.config.digest("corpus", "features", "dsp")}
        manifest.add_inputs([u.audio_path for u in utterances if u.audio_path] + [lm_dir / f"{u.utterance_id}.lm" for u in utterances])
        manifest.add_outputs(out_dir, [out_path])
        manifest.write(out_dir)
        logger.info(f"{corpus.corpus_id}: {len(table)} {variant} rows -> {out_path}")
        return out_path

    def load_features(self, corpus_id: str, variant: FeatureVariant) -> FeatureTable:
        feat_dir = self.feature_dir(corpus_id)
        check_upstream(feat_dir, self.config.force)
        path = self.feature_path(corpus_id, variant)
        if not path.is_file():
            available = sorted(p.stem for p in feat_dir.glob("*.csv"))
            raise DataError(f"no {variant} features for corpus '{corpus_id}' (available: {', '.join(available) or 'none'})")
        table = FeatureTable.read_csv(path)
        if table.variant is not variant:
            raise VariantMismatchError(f"{path} holds {table.variant} features, expected {variant}")
        return table

    def train(self, corpus: str | Path, variant: FeatureVariant | None = None, family: ModelFamily | None = None) -> Path:
        variant = variant or self.config.variant
        family = family or self.config.family
        corpus_id = corpus_id_of(corpus)
        table = self.load_features(corpus_id, variant)
        artifact = train(family, table.matrix(), table.labels(), self.config.train_config(), variant, corpus_id)

        self.model_dir.mkdir(parents=True, exist_ok=True)
        name = model_name(family, variant)
        artifact_path = self.model_dir / f"{name}.json"
        log_path = self.model_dir / f"{name}.log.csv"
        save_model(artifact, artifact_path)
        write_training_log(artifact.training_log, log_path)

        manifest = _load_or_new(self.model_dir, "train", artifact.metadata["config_hash"])
        manifest.parameters[name] = {"corpus_id": corpus_id, "config_hash": artifact.metadata["config_hash"], "dev_f1": artifact.metadata["dev_f1"]}
        manifest.add_inputs([self.feature_path(corpus_id, variant)])
        manifest.add_outputs(self.model_dir, [artifact_path, log_path])
        manifest.write(self.model_dir)
        logger.info(f"Trained {name} on {corpus_id}: dev F1 {artifact.metadata['dev_f1']:.4f} -> {artifact_path}")
        return artifact_path

    def _evaluate_one(self, artifact: ModelArtifact, corpus_id: str) -> EvalReport:
        table = self.load_features(corpus_id, artifact.variant)
        predictions, _ = artifact.predict(table.matrix())
        return EvalReport.from_predictions(corpus_id, artifact.variant.value, artifact.family.value, predictions, table.labels())

    def evaluate(self, artifact_path: str | Path, corpora: list[str | Path], variant: FeatureVariant | None = None, reference: str | Path | None = None) -> Path:
        """Score a model on a reference corpus and on every other corpus; reference defaults to the training corpus"""
        artifact_path = Path(artifact_path)
        if (artifact_path.parent / MANIFEST_NAME).is_file():
            check_upstream(artifact_path.parent, self.config.force)
        artifact = load_model(artifact_path)
        if variant is not None and variant is not artifact.variant:
            raise VariantMismatchError(f"model {artifact_path.name} was trained on {artifact.variant} features, requested {variant}")

        reference = reference or self.config.reference
        reference_id = corpus_id_of(reference) if reference else artifact.metadata.get("corpus_id") or corpus_id_of(corpora[0])
        other_ids = [c for c in dict.fromkeys(corpus_id_of(c) for c in corpora) if c != reference_id]
        reports = list(self._executor.map(lambda cid: self._evaluate_one(artifact, cid), [reference_id] + other_ids))
        report = cross_lingual_report(reports[0], reports[1:])

        out_dir = self.report_dir / model_name(artifact.family, artifact.variant)
        out_dir.mkdir(parents=True, exist_ok=True)
        outputs = {
            "report.csv": report.to_csv(),
            "increments.csv": report.increments_csv(),
            "table.txt": report.render(),
            "bars.csv": csv_text(bar_chart_rows([report])),
        }
        for filename, text in outputs.items():
            (out_dir / filename).write_text(text, encoding="utf-8")

        manifest = RunManifest("evaluate", sha256_file(artifact_path), parameters={"reference": reference_id, "corpora": other_ids})
        manifest.add_inputs([artifact_path] + [self.feature_path(c, artifact.variant) for c in [reference_id] + other_ids])
        manifest.add_outputs(out_dir, [out_dir / f for f in outputs])
        manifest.write(out_dir)
        logger.info(f"Evaluated {artifact_path.name} on {', '.join([reference_id] + other_ids)} -> {out_dir}")
        return out_dir

    def report(self) -> Path:
        """Merge every evaluate output into one increment comparison table"""
        report_files = sorted(self.report_dir.glob("*/report.csv")) if self.report_dir.is_dir() else []
        if not report_files:
            raise DataError(f"no evaluation reports found under {self.report_dir}")
        reports = []
        for path in report_files:
            check_upstream(path.parent, self.config.force)
            reports.append(read_report_csv(path.read_text(encoding="utf-8")))

        csv_path = self.report_dir / "comparison.csv"
        txt_path = self.report_dir / "comparison.txt"
        csv_path.write_text(comparison_csv(reports), encoding="utf-8")
        txt_path.write_text(comparison_text(reports), encoding="utf-8")
        manifest = RunManifest("report", _text_digest("\n".join(r.system for r in reports)), parameters={"systems": [r.system for r in reports]})
        manifest.add_inputs(report_files)
        manifest.add_outputs(self.report_dir, [csv_path, txt_path])
        manifest.write(self.report_dir)
        logger.info(f"Comparison of {len(reports)} systems -> {txt_path}")
        return txt_path


def _text_digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _load_or_new(directory: Path, stage: str, config_hash: str) -> RunManifest:
    """Stage directories shared by several runs (one CSV or model per variant) keep one merged manifest"""
    if (directory / MANIFEST_NAME).is_file():
        fresh = RunManifest(stage, config_hash)
        manifest = RunManifest.load(directory)
        manifest.config_hash = config_hash
        manifest.versions = fresh.versions
        manifest.created = fresh.created
        return manifest
    return RunManifest(stage, config_hash)
