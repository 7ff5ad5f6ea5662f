"""Command-line frontend.

Subcommands: vocab, rank, stopwords, evaluate, reduce-stats.  Every run is
deterministic (no randomness anywhere in the pipeline, so there is no seed
flag) and repeated invocations produce byte-identical primary outputs;
timestamps only appear in .meta.json sidecars.  Options may also be supplied
through a JSON config file (--config); explicit flags win over the file.

Exit codes: 0 success, 1 usage error, 2 data error, 3 scorer/protocol error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from ._version import __version__
from .corpus import Corpus, build_vocabulary, load_corpus
from .deletion import (
    ImportanceRanking,
    iterative_deletion,
    read_ranking_csv,
    recursive_deletion,
    sidecar_path,
    write_ranking_csv,
    write_trace_csv,
)
from .errors import DataError, ScorerError, UsageError
from .evaluation import (
    REPORT_CSV_HEADER,
    emit_reports,
    evaluate_stopword_set,
    reduction,
)
from .scorer import LogRegConfig, builtin_scorer, spawn_external_scorer
from .stopwords import (
    StopwordList,
    baseline_list,
    from_ranking,
    load_list,
    merge,
    save_list,
)

log = logging.getLogger("stopgen.cli")

_COMMON_IO_DEFAULTS = {
    "format": "tsv",
    "text_col": "sentence",
    "label_col": "label",
}

DEFAULTS: dict[str, dict] = {
    "vocab": {**_COMMON_IO_DEFAULTS, "output": None},
    "rank": {
        **_COMMON_IO_DEFAULTS,
        "mode": "iterative",
        "k": None,
        "output": None,
        "scorer": "builtin",
        "scorer_cmd": None,
        "pool_size": 1,
        "scorer_train": None,
        "workers": None,
        "batch_size": 32,
        "checkpoint": None,
        "checkpoint_every": 100,
        "resume": False,
    },
    "stopwords": {
        "n": None,
        "merge": None,
        "merge_baseline": False,
        "output": None,
    },
    "evaluate": {
        **_COMMON_IO_DEFAULTS,
        "include_empty": False,
        "output": None,
        "json": None,
        "C": 1.0,
        "tol": 1e-6,
        "max_iter": 1000,
    },
    "reduce-stats": {**_COMMON_IO_DEFAULTS, "output": None},
}


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting with its own code."""

    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="stopgen", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "-v", "--verbose", action="store_true", default=False,
        help="log progress to stderr",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    io_parent = _Parser(add_help=False)
    io_parent.add_argument("--format", choices=("tsv", "csv"), default=None)
    io_parent.add_argument("--text-col", dest="text_col", default=None)
    io_parent.add_argument("--label-col", dest="label_col", default=None)

    config_parent = _Parser(add_help=False)
    config_parent.add_argument(
        "--config", default=None,
        help="JSON file of option defaults; explicit flags override it",
    )
    config_parent.add_argument(
        "-v", "--verbose", dest="verbose_sub", action="store_true",
        default=None, help="log progress to stderr",
    )

    p = sub.add_parser(
        "vocab", parents=[io_parent, config_parent],
        help="count token/document frequencies of a corpus",
    )
    p.add_argument("corpus", help="corpus file (TSV/CSV with header)")
    p.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")

    p = sub.add_parser(
        "rank", parents=[io_parent, config_parent],
        help="rank tokens by the AUC change their deletion causes",
    )
    p.add_argument("corpus", help="corpus to rank (typically a test split)")
    p.add_argument("--mode", choices=("iterative", "recursive"), default=None)
    p.add_argument("-k", type=int, default=None,
                   help="stopwords to extract (recursive mode)")
    p.add_argument("-o", "--output", default=None, help="ranking CSV path")
    p.add_argument("--scorer", choices=("builtin", "external"), default=None)
    p.add_argument("--scorer-cmd", dest="scorer_cmd", default=None,
                   help="command line of an external scorer adapter")
    p.add_argument("--pool-size", dest="pool_size", type=int, default=None,
                   help="external scorer processes (default 1)")
    p.add_argument("--scorer-train", dest="scorer_train", default=None,
                   help="corpus to train the builtin scorer on "
                        "(default: the ranked corpus itself)")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel token evaluations (default: cpu count)")
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p.add_argument("--checkpoint", default=None, help="checkpoint JSON path")
    p.add_argument("--checkpoint-every", dest="checkpoint_every", type=int,
                   default=None, help="tokens between checkpoint writes")
    p.add_argument("--resume", action="store_true", default=None,
                   help="continue from an existing matching checkpoint")

    p = sub.add_parser(
        "stopwords", parents=[config_parent],
        help="cut a stopword list from a ranking file",
    )
    p.add_argument("ranking", help="ranking or trace CSV produced by rank")
    p.add_argument("-n", type=int, default=None,
                   help="number of least important tokens to take")
    p.add_argument("--merge", action="append", default=None, metavar="PATH",
                   help="stopword list file to merge in (repeatable)")
    p.add_argument("--merge-baseline", dest="merge_baseline",
                   action="store_true", default=None,
                   help="merge the bundled English baseline list")
    p.add_argument("-o", "--output", default=None, help="list path (default stdout)")

    p = sub.add_parser(
        "evaluate", parents=[io_parent, config_parent],
        help="retrain with stopword sets removed and report metrics",
    )
    p.add_argument("--train", required=True, help="training split file")
    p.add_argument("--eval", required=True, help="evaluation split file")
    p.add_argument("lists", nargs="*", help="stopword list files")
    p.add_argument("--include-empty", dest="include_empty",
                   action="store_true", default=None,
                   help="also evaluate the empty stopword set (baseline row)")
    p.add_argument("-o", "--output", default=None, help="report CSV (default stdout)")
    p.add_argument("--json", default=None, help="also write the full JSON report")
    p.add_argument("--C", dest="C", type=float, default=None,
                   help="logistic regression C (default 1.0)")
    p.add_argument("--tol", type=float, default=None,
                   help="optimizer gradient tolerance (default 1e-6)")
    p.add_argument("--max-iter", dest="max_iter", type=int, default=None)

    p = sub.add_parser(
        "reduce-stats", parents=[io_parent, config_parent],
        help="report dataset reduction without training anything",
    )
    p.add_argument("corpus", help="corpus file")
    p.add_argument("lists", nargs="+", help="stopword list files")
    p.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")

    return parser


def _resolve_options(args: argparse.Namespace) -> dict:
    """Layer defaults < config file < explicit flags."""
    defaults = DEFAULTS[args.command]
    resolved = dict(defaults)

    config_path = getattr(args, "config", None)
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read config file {config_path}: {exc}")
        except json.JSONDecodeError as exc:
            raise DataError(f"config file {config_path} is not valid JSON: {exc}")
        if not isinstance(loaded, dict):
            raise DataError(f"config file {config_path} must hold a JSON object")
        unknown = sorted(set(loaded) - set(defaults))
        if unknown:
            raise UsageError(
                f"config file {config_path} sets unknown option(s) for "
                f"'{args.command}': {', '.join(unknown)}"
            )
        resolved.update(loaded)

    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_sidecar(output: str, payload: dict) -> None:
    sidecar_path(output).write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8"
    )


def _open_output(path: str | None):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _load_split(path: str, opts: dict) -> Corpus:
    return load_corpus(
        path, fmt=opts["format"], text_col=opts["text_col"],
        label_col=opts["label_col"],
    )


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_vocab(args, opts) -> int:
    corpus = _load_split(args.corpus, opts)
    vocab = build_vocabulary(corpus)
    handle, close = _open_output(opts["output"])
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["token", "term_frequency", "document_frequency"])
        for entry in vocab.entries:
            writer.writerow(
                [entry.token, entry.term_frequency, entry.document_frequency]
            )
    finally:
        if close:
            handle.close()
    if opts["output"]:
        _write_sidecar(opts["output"], {
            "command": "vocab",
            "corpus": args.corpus,
            "corpus_fingerprint": corpus.fingerprint(),
            "vocabulary_size": len(vocab),
            "options": opts,
            "created_at": _utc_now(),
        })
    log.info("vocabulary of %d tokens from %d documents", len(vocab), len(corpus))
    return 0


def _make_scorer(opts: dict, rank_corpus: Corpus):
    """Returns (scorer, closer)."""
    if opts["scorer"] == "external":
        if not opts["scorer_cmd"]:
            raise UsageError("--scorer external requires --scorer-cmd")
        pool = spawn_external_scorer(opts["scorer_cmd"], opts["pool_size"])
        return pool, pool.close
    if opts["scorer_train"]:
        train = load_corpus(
            opts["scorer_train"], fmt=opts["format"],
            text_col=opts["text_col"], label_col=opts["label_col"],
        )
    else:
        train = rank_corpus
    return builtin_scorer(train), None


def _cmd_rank(args, opts) -> int:
    if opts["mode"] == "recursive" and opts["k"] is None:
        raise UsageError("recursive mode requires -k")
    if opts["mode"] == "iterative" and opts["k"] is not None:
        raise UsageError("-k only applies to --mode recursive")
    if opts["resume"] and not opts["checkpoint"]:
        raise UsageError("--resume requires --checkpoint")
    workers = opts["workers"] or os.cpu_count() or 1

    corpus = _load_split(args.corpus, opts)
    scorer, closer = _make_scorer(opts, corpus)

    def progress(done: int, out_of: int) -> None:
        stride = max(1, out_of // 20)
        if done % stride == 0 or done == out_of:
            log.info("evaluated %d/%d tokens", done, out_of)

    try:
        if opts["mode"] == "recursive":
            result = recursive_deletion(
                scorer, corpus, k=opts["k"],
                batch_size=opts["batch_size"], workers=workers,
                checkpoint_path=opts["checkpoint"],
                resume=bool(opts["resume"]), progress=progress,
            )
        else:
            result = iterative_deletion(
                scorer, corpus,
                batch_size=opts["batch_size"], workers=workers,
                checkpoint_path=opts["checkpoint"],
                checkpoint_every=opts["checkpoint_every"],
                resume=bool(opts["resume"]), progress=progress,
            )
    finally:
        if closer:
            closer()

    extra = {"options": {**opts, "workers": workers}, "corpus_path": args.corpus}
    if opts["output"]:
        if isinstance(result, ImportanceRanking):
            write_ranking_csv(result, opts["output"], extra)
        else:
            write_trace_csv(result, opts["output"], extra)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        if isinstance(result, ImportanceRanking):
            writer.writerow(["rank", "token", "delta_auc", "importance"])
            for e in result.entries:
                writer.writerow([e.rank, e.token, repr(e.delta_auc),
                                 repr(e.importance)])
        else:
            writer.writerow(["step", "token", "delta_auc", "corpus_auc"])
            for s in result.steps:
                writer.writerow([s.step, s.token, repr(s.delta_auc),
                                 repr(s.corpus_auc)])
    log.info("baseline AUC %.6f over %d documents", result.baseline_auc,
             len(corpus))
    return 0


def _cmd_stopwords(args, opts) -> int:
    if opts["n"] is None:
        raise UsageError("stopwords requires -n")
    ranking = read_ranking_csv(args.ranking)
    lists = [from_ranking(ranking, opts["n"])]
    for path in opts["merge"] or []:
        lists.append(load_list(path))
    if opts["merge_baseline"]:
        lists.append(baseline_list())
    result = merge(lists)

    if opts["output"]:
        save_list(result, opts["output"])
        _write_sidecar(opts["output"], {
            "command": "stopwords",
            "ranking": args.ranking,
            "options": opts,
            "provenance": result.provenance,
            "count": len(result),
            "created_at": _utc_now(),
        })
    else:
        for token in result:
            sys.stdout.write(token + "\n")
    log.info("stopword list of %d tokens (%s)", len(result), result.name)
    return 0


def _report_rows(reports) -> list[list[str]]:
    rows = [list(REPORT_CSV_HEADER)]
    for r in reports:
        rows.append([
            r.set_name, str(r.n_stopwords), f"{r.accuracy:.6f}",
            f"{r.auc:.6f}", f"{r.f1:.6f}",
            f"{r.train_reduction.token_reduction:.6f}",
            f"{r.eval_reduction.token_reduction:.6f}",
            f"{r.train_reduction.char_reduction:.6f}",
            f"{r.eval_reduction.char_reduction:.6f}",
        ])
    return rows


def _cmd_evaluate(args, opts) -> int:
    if not args.lists and not opts["include_empty"]:
        raise UsageError("evaluate needs stopword list files or --include-empty")
    train = _load_split(args.train, opts)
    evaluation = _load_split(args.eval, opts)
    config = LogRegConfig(C=opts["C"], tol=opts["tol"],
                          max_iter=opts["max_iter"])

    sets: list[StopwordList] = []
    if opts["include_empty"]:
        sets.append(StopwordList((), {"name": "none", "method": "empty"}))
    for path in args.lists:
        sets.append(load_list(path))

    reports = []
    for stopword_set in sets:
        reports.append(
            evaluate_stopword_set(train, evaluation, stopword_set, config)
        )
        log.info(
            "%s: accuracy %.4f, auc %.4f, train token reduction %.4f",
            stopword_set.name, reports[-1].accuracy, reports[-1].auc,
            reports[-1].train_reduction.token_reduction,
        )

    if opts["output"]:
        emit_reports(reports, opts["output"], fmt="csv")
        _write_sidecar(opts["output"], {
            "command": "evaluate",
            "train": args.train,
            "eval": args.eval,
            "lists": list(args.lists),
            "options": opts,
            "created_at": _utc_now(),
        })
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        for row in _report_rows(reports):
            writer.writerow(row)
    if opts["json"]:
        emit_reports(reports, opts["json"], fmt="json")
    return 0


def _cmd_reduce_stats(args, opts) -> int:
    corpus = _load_split(args.corpus, opts)
    handle, close = _open_output(opts["output"])
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([
            "set_name", "n_tokens", "split_name", "tokens_before",
            "tokens_after", "token_reduction", "chars_before", "chars_after",
            "char_reduction",
        ])
        for path in args.lists:
            stopword_set = load_list(path)
            report = reduction(corpus, stopword_set)
            writer.writerow([
                stopword_set.name, len(stopword_set), report.split_name,
                report.tokens_before, report.tokens_after,
                f"{report.token_reduction:.6f}", report.chars_before,
                report.chars_after, f"{report.char_reduction:.6f}",
            ])
    finally:
        if close:
            handle.close()
    if opts["output"]:
        _write_sidecar(opts["output"], {
            "command": "reduce-stats",
            "corpus": args.corpus,
            "lists": list(args.lists),
            "options": opts,
            "created_at": _utc_now(),
        })
    return 0


_HANDLERS = {
    "vocab": _cmd_vocab,
    "rank": _cmd_rank,
    "stopwords": _cmd_stopwords,
    "evaluate": _cmd_evaluate,
    "reduce-stats": _cmd_reduce_stats,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        verbose = args.verbose or bool(getattr(args, "verbose_sub", None))
        logging.basicConfig(
            level=logging.INFO if verbose else logging.WARNING,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
        opts = _resolve_options(args)
        return _HANDLERS[args.command](args, opts)
    except UsageError as exc:
        print(f"stopgen: usage error: {exc}", file=sys.stderr)
        return 1
    except ScorerError as exc:
        print(f"stopgen: scorer error: {exc}", file=sys.stderr)
        return 3
    except (DataError, OSError, ValueError) as exc:
        print(f"stopgen: error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
