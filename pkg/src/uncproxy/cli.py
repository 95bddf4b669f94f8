"""Command-line entry point: ``uncproxy synth|train|predict|analyze``.

Exit codes: 0 success, 2 usage or configuration error, 3 data or file
format error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import (
    ConfigError,
    DataFormatError,
    DegenerateInputError,
    InvalidCoverageError,
    InvalidInputError,
    JoinError,
    LabelParseError,
    SchemaMismatchError,
    TrainingDivergedError,
    UnlabeledSampleError,
)
from .pipeline import MODES, load_run_config, run_analyze, run_predict, run_synth, run_train

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_DATA_ERRORS = (
    DataFormatError,
    JoinError,
    LabelParseError,
    SchemaMismatchError,
    UnlabeledSampleError,
)
_NUMERIC_ERRORS = (
    TrainingDivergedError,
    DegenerateInputError,
    InvalidInputError,
    InvalidCoverageError,
    FloatingPointError,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uncproxy",
        description="Dropout-based uncertainty decomposition and calibration analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("synth", "generate a synthetic soft-labeled dataset"),
        ("train", "train the classifier on the train split"),
        ("predict", "write prediction logs for the configured modes"),
        ("analyze", "compute the evaluation and calibration report"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the run-config JSON file")
        cmd.add_argument("--mode", choices=MODES, default=None, help="override the config's mode")
        cmd.add_argument("--out", default=None, help="override the config's output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override training and synthesis seeds")
    return parser


def _print_summary(command: str, summary: dict):
    if command == "synth":
        print(
            f"synth: wrote {summary['n_samples']} samples, {summary['n_classes']} classes, "
            f"mean disagreement {summary['mean_disagreement']:.4f}, {summary['n_ood']} shifted"
        )
    elif command == "train":
        final = summary["final_loss"]
        loss_text = f"{final:.6f}" if final is not None else "n/a (0 epochs)"
        print(f"train: {summary['n_train_samples']} samples, final epoch loss {loss_text}")
    elif command == "predict":
        print(f"predict: logged {summary['n_samples']} samples to {len(summary['files'])} file(s)")
    else:
        models = ", ".join(
            f"{name} acc={entry['accuracy_pct']:.2f}%" for name, entry in summary["models"].items()
        )
        print(f"analyze: {summary['n_samples']} samples ({summary['split']}); {models}")
    for path in summary.get("files", []):
        print(f"  wrote {path}")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_run_config(args.config, mode=args.mode, out_dir=args.out, seed=args.seed)
        runner = {
            "synth": run_synth,
            "train": run_train,
            "predict": run_predict,
            "analyze": run_analyze,
        }[args.command]
        summary = runner(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except _NUMERIC_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.command == "analyze":
        _print_summary(args.command, {
            "n_samples": summary["n_samples"],
            "split": summary["split"],
            "models": summary["models"],
            "files": [],
        })
    else:
        _print_summary(args.command, summary)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
