"""Command-line entry point: ``pylandmark <stage> [options]``

Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from pylandmark.common import ConfigError, PyLandmarkError, __version__
from pylandmark.config import OPTIONS, PipelineConfig
from pylandmark.corpus.synth import SynthSpec
from pylandmark.features.variants import FeatureVariant
from pylandmark.models.artifact import ModelFamily
from pylandmark.pipeline import Pipeline

# Use package-level logger
logger = logging.getLogger("pylandmark")

COMMANDS = ("synth", "landmarks", "extract", "train", "evaluate", "report")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def _config_epilog() -> str:
    lines = ["config file keys ([section] key):"]
    for section in dict.fromkeys(s for s, _ in OPTIONS):
        keys = ", ".join(k for s, k in OPTIONS if s == section)
        lines.append(f"  [{section}] {keys}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, metavar="FILE", help="pipeline config file (INI)")
    common.add_argument("--out", type=Path, metavar="DIR", help="workspace directory [default: workspace]")
    common.add_argument("--seed", type=int, help="seed for every stochastic component")
    common.add_argument("--jobs", type=int, metavar="N", help="worker threads for per-utterance work")
    common.add_argument("--force", action="store_true", default=None, help="run even when upstream outputs changed since their manifest")
    common.add_argument("-v", "--verbose", action="store_true", default=None, help="debug logging on stderr")

    parser = _Parser(prog="pylandmark", description="Landmark-based consonant voicing classification", epilog=_config_epilog(), formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    synth = sub.add_parser("synth", parents=[common], help="generate a synthetic corpus")
    synth.add_argument("spec", nargs="?", type=Path, help="synthesis spec (INI with a [synth] section) [default: bundled spec]")

    landmarks = sub.add_parser("landmarks", parents=[common], help="derive landmark files from alignments")
    landmarks.add_argument("--corpus", action="append", metavar="DIR", help="corpus root (repeatable)")

    extract = sub.add_parser("extract", parents=[common], help="extract one feature variant per corpus")
    extract.add_argument("--corpus", action="append", metavar="DIR", help="corpus root (repeatable)")
    extract.add_argument("--variant", type=FeatureVariant.from_name, help=f"one of {', '.join(v.value for v in FeatureVariant)}")

    train = sub.add_parser("train", parents=[common], help="train a classifier on one corpus")
    train.add_argument("--corpus", action="append", metavar="ID", help="training corpus (workspace id or root)")
    train.add_argument("--variant", type=FeatureVariant.from_name, help="feature variant")
    train.add_argument("--model", metavar="FAMILY", help=f"one of {', '.join(f.value for f in ModelFamily)}")

    evaluate = sub.add_parser("evaluate", parents=[common], help="evaluate a trained model across corpora")
    evaluate.add_argument("--model", required=True, type=Path, metavar="ARTIFACT", help="model artifact (.json)")
    evaluate.add_argument("--corpus", action="append", metavar="ID", help="test corpus (repeatable); the training corpus is the reference")
    evaluate.add_argument("--variant", type=FeatureVariant.from_name, help="expected feature variant of the model")

    sub.add_parser("report", parents=[common], help="merge evaluation reports into one comparison table")
    return parser


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    config = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    return config.override(out=args.out, seed=args.seed, jobs=args.jobs, force=args.force, verbose=args.verbose, variant=getattr(args, "variant", None))


def _corpora(args: argparse.Namespace, config: PipelineConfig) -> list[str]:
    corpora = getattr(args, "corpus", None) or config.corpora
    if not corpora:
        raise ConfigError("no corpus given (use --corpus or [corpus] roots)")
    return corpora


def run(args: argparse.Namespace) -> list[Path]:
    config = _load_config(args)
    outputs: list[Path] = []
    with Pipeline(config) as pipeline:
        if args.command == "synth":
            spec = SynthSpec.from_ini(args.spec) if args.spec else SynthSpec.default()
            if args.seed is not None:
                spec = replace(spec, seed=args.seed)
            outputs.append(pipeline.synth(spec))
        elif args.command == "landmarks":
            outputs.extend(pipeline.landmarks(root) for root in _corpora(args, config))
        elif args.command == "extract":
            outputs.extend(pipeline.extract(root) for root in _corpora(args, config))
        elif args.command == "train":
            family = config.family
            if args.model:
                try:
                    family = ModelFamily(args.model.lower())
                except ValueError:
                    raise ConfigError(f"unknown model family '{args.model}' (expected {', '.join(f.value for f in ModelFamily)})") from None
            outputs.append(pipeline.train(_corpora(args, config)[0], family=family))
        elif args.command == "evaluate":
            outputs.append(pipeline.evaluate(args.model, _corpora(args, config), variant=args.variant))
        elif args.command == "report":
            outputs.append(pipeline.report())
    return outputs


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
    logger.addHandler(handler)
    try:
        for path in run(args):
            print(path)
        return 0
    except PyLandmarkError as e:
        logger.error(str(e))
        return e.exit_code
    finally:
        logger.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
