import csv
import random

import pytest

from stopgen.corpus import Corpus, build_vocabulary
from stopgen.errors import DataError
from stopgen.evaluation import (
    REPORT_CSV_HEADER,
    emit_reports,
    evaluate_stopword_set,
    load_reports,
    reduction,
)
from stopgen.metrics import accuracy, f1, roc_auc
from stopgen.scorer import (
    LogRegConfig,
    fit_tfidf,
    predict_proba_many,
    train_logreg,
    transform_many,
)
from stopgen.stopwords import StopwordList

from synth import random_corpus


@pytest.fixture
def splits():
    rng = random.Random(41)
    def make(split, n):
        texts, labels = [], []
        for i in range(n):
            label = i % 2
            core = ["great", "lovely"] if label else ["awful", "boring"]
            filler = [rng.choice(["the", "movie", "plot", "cast"]) for _ in range(4)]
            texts.append(" ".join(core + filler))
            labels.append(label)
        return Corpus.from_texts(texts, labels, split)
    return make("train", 60), make("eval", 30)


class TestReduction:
    def test_empty_set(self, splits):
        train, _ = splits
        report = reduction(train, StopwordList(()))
        assert report.token_reduction == 0.0
        assert report.char_reduction == 0.0
        assert report.tokens_after == report.tokens_before

    def test_full_vocabulary(self, splits):
        train, _ = splits
        everything = StopwordList(tuple(build_vocabulary(train).tokens()))
        report = reduction(train, everything)
        assert report.token_reduction == 1.0
        assert report.tokens_after == 0

    def test_simple_arithmetic(self):
        # 100 tokens, stopwords covering 28 occurrences
        texts = [" ".join(["keep"] * 18 + ["drop"] * 7) for _ in range(4)]
        corpus = Corpus.from_texts(texts, [0, 1, 0, 1])
        assert corpus.total_tokens() == 100
        report = reduction(corpus, StopwordList(("drop",)))
        assert report.token_reduction == pytest.approx(0.28)

    def test_exact_token_accounting(self):
        rng = random.Random(42)
        for _ in range(25):
            corpus = random_corpus(rng)
            vocab = build_vocabulary(corpus)
            if not len(vocab):
                continue
            chosen = rng.sample(vocab.tokens(), rng.randint(0, len(vocab)))
            report = reduction(corpus, StopwordList(tuple(sorted(chosen))))
            removed = sum(vocab.term_frequency(t) for t in chosen)
            assert report.tokens_after == report.tokens_before - removed

    def test_superset_monotonicity(self):
        rng = random.Random(43)
        for _ in range(25):
            corpus = random_corpus(rng)
            vocab = build_vocabulary(corpus).tokens()
            if len(vocab) < 2:
                continue
            small = sorted(rng.sample(vocab, rng.randint(0, len(vocab) - 1)))
            extra = [t for t in vocab if t not in small]
            big = sorted(small + rng.sample(extra, rng.randint(1, len(extra))))
            r_small = reduction(corpus, StopwordList(tuple(small)))
            r_big = reduction(corpus, StopwordList(tuple(big)))
            assert r_small.token_reduction <= r_big.token_reduction

    def test_empty_corpus(self):
        report = reduction(Corpus((), "void"), StopwordList(("a",)))
        assert report.token_reduction == 0.0
        assert report.char_reduction == 0.0


class TestEvaluateStopwordSet:
    def test_empty_set_equals_plain_pipeline(self, splits):
        train, evaluation = splits
        report = evaluate_stopword_set(train, evaluation, StopwordList(()))

        vec = fit_tfidf(train)
        features = transform_many(vec, [d.tokens for d in train.documents])
        model = train_logreg(features, train.labels(), LogRegConfig())
        eval_features = transform_many(
            vec, [d.tokens for d in evaluation.documents]
        )
        scores = predict_proba_many(model, eval_features)
        assert report.accuracy == accuracy(scores, evaluation.labels())
        assert report.auc == roc_auc(scores, evaluation.labels())
        assert report.f1 == f1(scores, evaluation.labels())
        assert report.train_reduction.token_reduction == 0.0
        assert report.eval_reduction.token_reduction == 0.0

    def test_full_vocabulary_degenerates_to_majority_class(self):
        train = Corpus.from_texts(
            ["yes fine", "yes good", "no bad"], [1, 1, 0], "train"
        )
        evaluation = Corpus.from_texts(
            ["novel words", "unseen stuff", "other thing", "more here"],
            [1, 1, 1, 0],
            "eval",
        )
        everything = StopwordList(tuple(build_vocabulary(train).tokens()))
        # the eval split keeps its out-of-train-vocabulary tokens
        report = evaluate_stopword_set(train, evaluation, everything)
        assert report.train_reduction.token_reduction == 1.0
        assert report.accuracy == 0.75  # majority class of eval is 1 (3 of 4)

    def test_determinism(self, splits):
        train, evaluation = splits
        stopwords = StopwordList(("the", "movie"))
        a = evaluate_stopword_set(train, evaluation, stopwords)
        b = evaluate_stopword_set(train, evaluation, stopwords)
        assert a == b

    def test_single_class_wipe_is_rejected(self):
        train = Corpus.from_texts(
            ["posword", "posword again", "negword", "negword too"],
            [1, 1, 0, 0],
            "train",
        )
        evaluation = Corpus.from_texts(
            ["posword", "negword"], [1, 0], "eval"
        )
        wipe_negatives = StopwordList(("negword", "too"))
        with pytest.raises(DataError, match="class-0"):
            evaluate_stopword_set(train, evaluation, wipe_negatives, set_name=None)

    def test_error_names_the_list(self):
        train = Corpus.from_texts(["aa", "bb"], [1, 0], "train")
        evaluation = Corpus.from_texts(["aa", "bb"], [1, 0], "eval")
        lst = StopwordList(("bb",), {"name": "nasty-list"})
        with pytest.raises(DataError, match="nasty-list"):
            evaluate_stopword_set(train, evaluation, lst)

    def test_combined_reduction_pools_both_splits(self, splits):
        train, evaluation = splits
        report = evaluate_stopword_set(train, evaluation, StopwordList(("the",)))
        assert (
            report.combined_reduction.tokens_before
            == report.train_reduction.tokens_before
            + report.eval_reduction.tokens_before
        )

    def test_config_echo(self, splits):
        train, evaluation = splits
        cfg = LogRegConfig(C=2.0, tol=1e-7, max_iter=500)
        report = evaluate_stopword_set(train, evaluation, StopwordList(()), cfg)
        assert report.config == {"C": 2.0, "tol": 1e-7, "max_iter": 500}


class TestEmitReports:
    def _reports(self, splits):
        train, evaluation = splits
        return [
            evaluate_stopword_set(train, evaluation, StopwordList((), {"name": "none"})),
            evaluate_stopword_set(
                train, evaluation,
                StopwordList(("the", "movie"), {"name": "tiny, with comma"}),
            ),
        ]

    def test_csv_shape_and_precision(self, splits, tmp_path):
        reports = self._reports(splits)
        path = tmp_path / "report.csv"
        emit_reports(reports, path, fmt="csv")
        with path.open(newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == REPORT_CSV_HEADER
        assert len(rows) == 3
        # floats carry exactly six decimals
        for cell in rows[1][2:]:
            assert len(cell.split(".")[1]) == 6

    def test_csv_quoting_is_rfc4180(self, splits, tmp_path):
        reports = self._reports(splits)
        path = tmp_path / "report.csv"
        emit_reports(reports, path, fmt="csv")
        text = path.read_text()
        assert '"tiny, with comma"' in text
        with path.open(newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[2][0] == "tiny, with comma"

    def test_json_roundtrip(self, splits, tmp_path):
        reports = self._reports(splits)
        path = tmp_path / "report.json"
        emit_reports(reports, path, fmt="json")
        assert load_reports(path) == reports

    def test_single_report(self, splits, tmp_path):
        reports = self._reports(splits)[:1]
        path = tmp_path / "one.csv"
        emit_reports(reports, path, fmt="csv")
        assert len(path.read_text().strip().splitlines()) == 2

    def test_requires_reports(self, tmp_path):
        with pytest.raises(DataError):
            emit_reports([], tmp_path / "x.csv")
