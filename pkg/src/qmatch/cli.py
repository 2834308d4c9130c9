"""Command-line entry points.

Subcommands: train, eval, grid-search, inspect-words, inspect-match,
inspect-measurements, metric-audit.  Hyperparameters come from an
optional JSON config file; explicit flags win over the file.  Exit
codes: 0 success, 2 configuration/parse/missing-path problems, 3 data
problems, 4 numeric or domain failures, 1 anything unexpected.

``QMATCH_THREADS`` caps the BLAS thread pools; it is applied before
numpy is first imported, which is why the numeric modules are imported
lazily inside the command handlers.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import (
    ConfigError,
    DataError,
    DomainError,
    NumericError,
    ParseError,
    QmatchError,
    ShapeError,
)

_THREAD_VARS = (
    "OPENBLAS_NUM_THREADS",
    "OMP_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)

CHECKPOINT_NAME = "checkpoint.qmatch"
BEST_CHECKPOINT_NAME = "best_checkpoint.qmatch"
TRAIN_LOG_NAME = "train_log.jsonl"
DEV_REPORT_NAME = "dev_report.jsonl"
EVAL_REPORT_NAME = "eval_report.jsonl"
GRID_RESULTS_NAME = "grid_results.jsonl"
AUDIT_TABLE_NAME = "metric_audit.txt"
AUDIT_DETAILS_NAME = "metric_audit.json"


def _configure_threads(strict: bool = True) -> None:
    value = os.environ.get("QMATCH_THREADS")
    if value is None:
        return
    if not value.isdigit() or int(value) < 1:
        if strict:
            raise ConfigError(
                f"QMATCH_THREADS must be a positive integer, got {value!r}"
            )
        return
    for var in _THREAD_VARS:
        os.environ.setdefault(var, value)


# Cap the pools before anything imports numpy.  Validation is deferred to
# main() so that a bad value becomes a clean exit-code-2 error there rather
# than a traceback out of module import.
_configure_threads(strict=False)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints: {exc}")


# TrainerConfig fields exposed as flags: (flag type, help)
_CONFIG_FLAGS: dict[str, tuple] = {
    "embedding_dim": (int, "amplitude/phase embedding dimension"),
    "num_measurements": (int, "number of measurement vectors"),
    "window_sizes": (_parse_int_list, "comma-separated sliding-window widths"),
    "mixture": (str, "'local' (windows) or 'global' (whole sentence)"),
    "complex_valued": (_parse_bool, "false trains a real-only ablation"),
    "margin": (float, "triplet hinge margin"),
    "learning_rate": (float, "optimizer step size"),
    "l2_lambda": (float, "L2 decay on amplitude rows"),
    "batch_size": (int, "triplets per optimizer step"),
    "epochs": (int, "training epochs"),
    "dropout_rate": (float, "dropout probability (or keep prob, see below)"),
    "dropout_is_keep_prob": (_parse_bool, "read dropout_rate as keep probability"),
    "optimizer": (str, "'sgd' or 'adam'"),
    "max_sentence_len": (int, "sentences truncate to this many tokens"),
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    for name, (ftype, help_text) in _CONFIG_FLAGS.items():
        parser.add_argument(
            "--" + name.replace("_", "-"), dest=name, type=ftype,
            default=None, help=help_text,
        )
    parser.add_argument(
        "--config", type=str, default=None,
        help="JSON file of hyperparameters (flags override it)",
    )
    parser.add_argument("--seed", type=int, default=None, help="run seed")


def _require_path(path: str | None, what: str) -> Path:
    if path is None:
        raise ConfigError(f"missing required {what} path")
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"no such {what}: {p}")
    return p


def _out_dir(args) -> Path:
    out = Path(args.out if args.out else ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _flag_overrides(args) -> dict:
    overrides = {
        name: getattr(args, name)
        for name in _CONFIG_FLAGS
        if getattr(args, name, None) is not None
    }
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return overrides


def _build_config(args):
    from .model import TrainerConfig

    if args.config is not None:
        path = _require_path(args.config, "config file")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from exc
        config = TrainerConfig.from_dict(data)
    else:
        config = TrainerConfig()
    config = config.with_overrides(**_flag_overrides(args))
    config.validate()
    return config


def _load_dataset(path_str: str, format_spec: str, split: str):
    from .data import load_tsv, resolve_format

    path = _require_path(path_str, "dataset")
    fmt = resolve_format(format_spec)
    dataset, report = load_tsv(path, fmt, split=split)
    print(report.summary(), file=sys.stderr)
    return dataset


# Model-structural fields that must agree with a loaded checkpoint.
_STRUCTURAL = (
    "embedding_dim", "num_measurements", "window_sizes",
    "mixture", "complex_valued", "max_sentence_len",
)


def _load_checkpoint_for(args):
    from .checkpoint import load_checkpoint

    path = _require_path(args.checkpoint, "checkpoint")
    params, config, vocab = load_checkpoint(path)
    overrides = _flag_overrides(args)
    for key in _STRUCTURAL:
        if key in overrides and overrides[key] != getattr(config, key):
            raise ConfigError(
                f"flag --{key.replace('_', '-')}={overrides[key]!r} conflicts "
                f"with checkpoint value {getattr(config, key)!r}"
            )
    if overrides:
        config = config.with_overrides(**overrides)
        config.validate()
    return params, config, vocab


def cmd_train(args) -> int:
    from .checkpoint import save_checkpoint
    from .evaluation import evaluate
    from .training import train

    config = _build_config(args)
    train_set = _load_dataset(args.dataset, args.format, split="train")
    dev_set = (
        _load_dataset(args.dev, args.format, split="dev") if args.dev else None
    )
    out = _out_dir(args)
    log_path = out / TRAIN_LOG_NAME
    with open(log_path, "w", encoding="utf-8") as log_file:

        def log_fn(record: dict) -> None:
            log_file.write(json.dumps(record) + "\n")

        result = train(
            train_set, dev_set, config, glove_path=args.glove, log_fn=log_fn
        )
    ckpt_path = out / CHECKPOINT_NAME
    save_checkpoint(ckpt_path, result.params, config, result.vocab)
    print(f"checkpoint: {ckpt_path}")
    print(f"training log: {log_path}")
    if dev_set is not None:
        report = evaluate(result.params, dev_set, config, result.vocab)
        report.write_jsonl(out / DEV_REPORT_NAME)
        print(
            f"best epoch {result.best_epoch}: "
            f"dev MAP {report.map:.4f}, dev MRR {report.mrr:.4f}"
        )
    return 0


def cmd_eval(args) -> int:
    from .evaluation import evaluate

    params, config, vocab = _load_checkpoint_for(args)
    dataset = _load_dataset(args.dataset, args.format, split=args.split)
    report = evaluate(params, dataset, config, vocab)
    out = _out_dir(args)
    report_path = out / EVAL_REPORT_NAME
    report.write_jsonl(report_path)
    print(report.format_table())
    print(f"report: {report_path}")
    return 0


def cmd_grid_search(args) -> int:
    from .checkpoint import save_checkpoint
    from .training import DEFAULT_GRID_POOLS, grid_search

    config = _build_config(args)
    train_set = _load_dataset(args.dataset, args.format, split="train")
    dev_set = _load_dataset(args.dev, args.format, split="dev")
    if args.grid is not None:
        grid_path = _require_path(args.grid, "grid file")
        try:
            pools = json.loads(grid_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{grid_path}: invalid JSON ({exc})") from exc
        if not isinstance(pools, dict):
            raise ParseError(f"{grid_path}: expected an object of pools")
    else:
        pools = DEFAULT_GRID_POOLS
    out = _out_dir(args)
    rows_path = out / GRID_RESULTS_NAME
    with open(rows_path, "w", encoding="utf-8") as rows_file:

        def log_fn(record: dict) -> None:
            if record.get("kind") == "grid":
                rows_file.write(json.dumps(record) + "\n")

        result = grid_search(
            train_set, dev_set, config, pools,
            glove_path=args.glove, log_fn=log_fn,
        )
    ckpt_path = out / BEST_CHECKPOINT_NAME
    save_checkpoint(
        ckpt_path, result.best.params, result.best_row.config, result.best.vocab
    )
    print(f"grid rows: {rows_path}")
    print(f"best checkpoint: {ckpt_path}")
    print(f"best dev MAP {result.best_row.dev_map:.4f} "
          f"with {json.dumps(result.best_row.config.to_dict(), sort_keys=True)}")
    return 0


def _write_or_print(text: str, out_path: Path | None) -> None:
    if out_path is None:
        print(text, end="" if text.endswith("\n") else "\n")
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text, encoding="utf-8")
        print(f"report: {out_path}")


def cmd_inspect_words(args) -> int:
    from .interpret import word_importance

    params, _, vocab = _load_checkpoint_for(args)
    rows = word_importance(params, vocab, top_n=args.top_n)
    lines = ["rank\ttoken\tnorm"]
    lines += [f"{i + 1}\t{r.token}\t{r.norm:.6f}" for i, r in enumerate(rows)]
    _write_or_print("\n".join(lines) + "\n",
                    Path(args.out) if args.out else None)
    return 0


def cmd_inspect_match(args) -> int:
    from .interpret import match_weight_map

    params, config, vocab = _load_checkpoint_for(args)
    result = match_weight_map(params, config, vocab, args.question, args.answer)
    lines = [
        f"window_size\t{result.window_size}",
        f"similarity\t{result.similarity:.6f}",
        "side\tposition\ttoken\tweight",
    ]
    for side, win in (
        ("question", result.question_window),
        ("answer", result.answer_window),
    ):
        for offset, (token, weight) in enumerate(zip(win.tokens, win.weights)):
            lines.append(f"{side}\t{win.start + offset}\t{token}\t{weight:.6f}")
    _write_or_print("\n".join(lines) + "\n",
                    Path(args.out) if args.out else None)
    return 0


def cmd_inspect_measurements(args) -> int:
    from .interpret import measurement_neighbors

    params, _, vocab = _load_checkpoint_for(args)
    rows = measurement_neighbors(params, vocab, top_n=args.top_n)
    lines = ["measurement\trank\ttoken\tsimilarity"]
    for entry in rows:
        for rank, (token, sim) in enumerate(
            zip(entry.tokens, entry.similarities), start=1
        ):
            lines.append(f"{entry.measurement}\t{rank}\t{token}\t{sim:.6f}")
    _write_or_print("\n".join(lines) + "\n",
                    Path(args.out) if args.out else None)
    return 0


def cmd_metric_audit(args) -> int:
    from .density_metrics import (
        METRIC_FNS,
        audit_metric,
        render_audit_table,
        report_to_dict,
    )

    names = (
        [n.strip() for n in args.metrics.split(",") if n.strip()]
        if args.metrics
        else sorted(METRIC_FNS)
    )
    dims = args.dims if args.dims else (2, 3, 4)
    seed = args.seed if args.seed is not None else 0
    reports = [
        audit_metric(name, trials=args.trials, dims=tuple(dims), seed=seed)
        for name in names
    ]
    table = render_audit_table(reports)
    out = _out_dir(args)
    (out / AUDIT_TABLE_NAME).write_text(table, encoding="utf-8")
    details = [report_to_dict(rep) for rep in reports]
    (out / AUDIT_DETAILS_NAME).write_text(
        json.dumps(details, indent=2), encoding="utf-8"
    )
    print(table, end="")
    print(f"table: {out / AUDIT_TABLE_NAME}")
    print(f"details: {out / AUDIT_DETAILS_NAME}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmatch",
        description="complex-valued semantic matching for question answering",
    )
    sub = parser.add_subparsers(dest="command")

    p_train = sub.add_parser("train", help="train a matcher and save a checkpoint")
    p_train.add_argument("--dataset", required=True, help="training TSV")
    p_train.add_argument("--dev", default=None, help="dev TSV for model selection")
    p_train.add_argument("--format", default="canonical",
                         help="format preset name or descriptor file")
    p_train.add_argument("--glove", default=None,
                         help="pretrained vector file for amplitude init")
    p_train.add_argument("--out", default=None, help="output directory")
    _add_config_flags(p_train)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="score a dataset with a checkpoint")
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--dataset", required=True)
    p_eval.add_argument("--format", default="canonical")
    p_eval.add_argument("--split", default="eval", help="split name for reports")
    p_eval.add_argument("--out", default=None, help="output directory")
    _add_config_flags(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_grid = sub.add_parser("grid-search", help="hyperparameter sweep on dev MAP")
    p_grid.add_argument("--dataset", required=True)
    p_grid.add_argument("--dev", required=True)
    p_grid.add_argument("--format", default="canonical")
    p_grid.add_argument("--glove", default=None)
    p_grid.add_argument("--grid", default=None,
                        help="JSON file of {field: [values]} pools")
    p_grid.add_argument("--out", default=None)
    _add_config_flags(p_grid)
    p_grid.set_defaults(func=cmd_grid_search)

    p_words = sub.add_parser("inspect-words",
                             help="rank words by learned amplitude norm")
    p_words.add_argument("--checkpoint", required=True)
    p_words.add_argument("--top-n", dest="top_n", type=int, default=50)
    p_words.add_argument("--out", default=None, help="output file (default stdout)")
    _add_config_flags(p_words)
    p_words.set_defaults(func=cmd_inspect_words)

    p_match = sub.add_parser("inspect-match",
                             help="best-matching window pair for a QA pair")
    p_match.add_argument("--checkpoint", required=True)
    p_match.add_argument("--question", required=True)
    p_match.add_argument("--answer", required=True)
    p_match.add_argument("--out", default=None, help="output file (default stdout)")
    _add_config_flags(p_match)
    p_match.set_defaults(func=cmd_inspect_match)

    p_meas = sub.add_parser("inspect-measurements",
                            help="nearest words to each measurement vector")
    p_meas.add_argument("--checkpoint", required=True)
    p_meas.add_argument("--top-n", dest="top_n", type=int, default=10)
    p_meas.add_argument("--out", default=None, help="output file (default stdout)")
    _add_config_flags(p_meas)
    p_meas.set_defaults(func=cmd_inspect_measurements)

    p_audit = sub.add_parser("metric-audit",
                             help="empirical axiom audit of density-matrix metrics")
    p_audit.add_argument("--trials", type=int, default=10_000)
    p_audit.add_argument("--dims", type=_parse_int_list, default=None,
                         help="comma-separated matrix dimensions (default 2,3,4)")
    p_audit.add_argument("--metrics", default=None,
                         help="comma-separated metric names (default: all)")
    p_audit.add_argument("--seed", type=int, default=None)
    p_audit.add_argument("--out", default=None)
    p_audit.set_defaults(func=cmd_metric_audit)

    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        _configure_threads()
        parser = _build_parser()
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            parser.print_help()
            return 2
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing path: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DomainError, NumericError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except QmatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0
    except Exception as exc:  # pragma: no cover - last resort
        print(f"unexpected error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
