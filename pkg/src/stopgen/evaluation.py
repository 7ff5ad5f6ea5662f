"""Downstream validation: retrain on a reduced corpus and measure the cost.

A stopword set is applied to both the training and the evaluation split,
a fresh TF-IDF + logistic-regression model is fitted on the reduced train
split, and the report combines classification metrics on the evaluation
split with exact token/character reduction accounting for both splits.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Corpus, delete_tokens
from .errors import DataError
from .metrics import accuracy, f1, roc_auc
from .scorer import (
    LogRegConfig,
    fit_tfidf,
    predict_proba_many,
    train_logreg,
    transform_many,
)
from .stopwords import StopwordList

REPORT_CSV_HEADER = [
    "set_name",
    "n_tokens",
    "accuracy",
    "auc",
    "f1",
    "train_token_reduction",
    "eval_token_reduction",
    "train_char_reduction",
    "eval_char_reduction",
]


@dataclass(frozen=True)
class ReductionReport:
    """Exact token and character counts before/after stopword removal."""

    split_name: str
    tokens_before: int
    tokens_after: int
    token_reduction: float
    chars_before: int
    chars_after: int
    char_reduction: float

    def to_dict(self) -> dict:
        return {
            "split_name": self.split_name,
            "tokens_before": self.tokens_before,
            "tokens_after": self.tokens_after,
            "token_reduction": self.token_reduction,
            "chars_before": self.chars_before,
            "chars_after": self.chars_after,
            "char_reduction": self.char_reduction,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReductionReport":
        return cls(**data)


@dataclass(frozen=True)
class EvalReport:
    """Metrics on the evaluation split plus reductions for both splits."""

    set_name: str
    provenance: dict
    n_stopwords: int
    accuracy: float
    auc: float
    f1: float
    train_reduction: ReductionReport
    eval_reduction: ReductionReport
    combined_reduction: ReductionReport
    config: dict

    def to_dict(self) -> dict:
        return {
            "set_name": self.set_name,
            "provenance": self.provenance,
            "n_stopwords": self.n_stopwords,
            "accuracy": self.accuracy,
            "auc": self.auc,
            "f1": self.f1,
            "train_reduction": self.train_reduction.to_dict(),
            "eval_reduction": self.eval_reduction.to_dict(),
            "combined_reduction": self.combined_reduction.to_dict(),
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(
            set_name=data["set_name"],
            provenance=data["provenance"],
            n_stopwords=data["n_stopwords"],
            accuracy=data["accuracy"],
            auc=data["auc"],
            f1=data["f1"],
            train_reduction=ReductionReport.from_dict(data["train_reduction"]),
            eval_reduction=ReductionReport.from_dict(data["eval_reduction"]),
            combined_reduction=ReductionReport.from_dict(
                data["combined_reduction"]
            ),
            config=data["config"],
        )


def _fraction_removed(before: int, after: int) -> float:
    return 0.0 if before == 0 else 1.0 - after / before


def _reduction_between(original: Corpus, reduced: Corpus) -> ReductionReport:
    tokens_before = original.total_tokens()
    tokens_after = reduced.total_tokens()
    chars_before = original.total_chars()
    chars_after = reduced.total_chars()
    return ReductionReport(
        split_name=original.split_name,
        tokens_before=tokens_before,
        tokens_after=tokens_after,
        token_reduction=_fraction_removed(tokens_before, tokens_after),
        chars_before=chars_before,
        chars_after=chars_after,
        char_reduction=_fraction_removed(chars_before, chars_after),
    )


def _combine(a: ReductionReport, b: ReductionReport) -> ReductionReport:
    tokens_before = a.tokens_before + b.tokens_before
    tokens_after = a.tokens_after + b.tokens_after
    chars_before = a.chars_before + b.chars_before
    chars_after = a.chars_after + b.chars_after
    return ReductionReport(
        split_name=f"{a.split_name}+{b.split_name}",
        tokens_before=tokens_before,
        tokens_after=tokens_after,
        token_reduction=_fraction_removed(tokens_before, tokens_after),
        chars_before=chars_before,
        chars_after=chars_after,
        char_reduction=_fraction_removed(chars_before, chars_after),
    )


def reduction(corpus: Corpus, stopwords: StopwordList) -> ReductionReport:
    """Exact dataset shrinkage caused by removing ``stopwords``."""
    reduced = delete_tokens(corpus, stopwords.tokens)
    return _reduction_between(corpus, reduced)


def _check_no_class_wipe(
    reduced: Corpus, set_name: str, split_name: str
) -> None:
    """Reject sets that empty every document of exactly one class.

    Wiping both classes (removing the entire vocabulary) stays legal and
    degenerates to a bias-only model; wiping one class would teach the model
    that emptiness predicts a label, which is an artifact of the list.
    """
    has_content = {0: False, 1: False}
    present = {0: False, 1: False}
    for doc in reduced:
        present[doc.label] = True
        if doc.tokens:
            has_content[doc.label] = True
    for label in (0, 1):
        other = 1 - label
        if present[label] and not has_content[label] and has_content[other]:
            raise DataError(
                f"stopword set {set_name!r} empties every class-{label} "
                f"document in split {split_name!r}"
            )


def evaluate_stopword_set(
    train: Corpus,
    evaluation: Corpus,
    stopwords: StopwordList,
    config: LogRegConfig | None = None,
    set_name: str | None = None,
) -> EvalReport:
    """Retrain with the stopword set removed and report the consequences.

    Removal happens before TF-IDF fitting, so the feature vocabulary
    shrinks; the evaluation split is reduced symmetrically.
    """
    cfg = config or LogRegConfig()
    name = set_name if set_name is not None else stopwords.name

    reduced_train = delete_tokens(train, stopwords.tokens)
    reduced_eval = delete_tokens(evaluation, stopwords.tokens)
    _check_no_class_wipe(reduced_train, name, train.split_name)
    _check_no_class_wipe(reduced_eval, name, evaluation.split_name)

    vectorizer = fit_tfidf(reduced_train)
    train_features = transform_many(
        vectorizer, [doc.tokens for doc in reduced_train.documents]
    )
    model = train_logreg(train_features, reduced_train.labels(), cfg)

    eval_features = transform_many(
        vectorizer, [doc.tokens for doc in reduced_eval.documents]
    )
    scores = predict_proba_many(model, eval_features)
    labels = reduced_eval.labels()

    train_reduction = _reduction_between(train, reduced_train)
    eval_reduction = _reduction_between(evaluation, reduced_eval)
    return EvalReport(
        set_name=name,
        provenance=stopwords.provenance,
        n_stopwords=len(stopwords),
        accuracy=accuracy(scores, labels),
        auc=roc_auc(scores, labels),
        f1=f1(scores, labels),
        train_reduction=train_reduction,
        eval_reduction=eval_reduction,
        combined_reduction=_combine(train_reduction, eval_reduction),
        config=cfg.as_dict(),
    )


def emit_reports(
    reports: Sequence[EvalReport], path: str | Path, fmt: str = "csv"
) -> None:
    """Write reports as CSV (floats at 6 decimal places) or as full JSON."""
    if not reports:
        raise DataError("emit_reports requires at least one report")
    path = Path(path)
    if fmt == "csv":
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(REPORT_CSV_HEADER)
            for report in reports:
                writer.writerow(
                    [
                        report.set_name,
                        report.n_stopwords,
                        f"{report.accuracy:.6f}",
                        f"{report.auc:.6f}",
                        f"{report.f1:.6f}",
                        f"{report.train_reduction.token_reduction:.6f}",
                        f"{report.eval_reduction.token_reduction:.6f}",
                        f"{report.train_reduction.char_reduction:.6f}",
                        f"{report.eval_reduction.char_reduction:.6f}",
                    ]
                )
    elif fmt == "json":
        path.write_text(
            json.dumps([report.to_dict() for report in reports], indent=2)
            + "\n",
            encoding="utf-8",
        )
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")


def load_reports(path: str | Path) -> list[EvalReport]:
    """Read back reports emitted as JSON."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [EvalReport.from_dict(item) for item in data]
