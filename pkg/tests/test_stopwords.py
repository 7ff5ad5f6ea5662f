import random

import pytest

from stopgen.corpus import Corpus
from stopgen.deletion import iterative_deletion, recursive_deletion
from stopgen.errors import DataError
from stopgen.stopwords import (
    StopwordList,
    baseline_list,
    from_ranking,
    load_list,
    merge,
    save_list,
)

from test_deletion import KeywordStub


@pytest.fixture
def ranking():
    corpus = Corpus.from_texts(
        ["good fun", "meh slow", "good nice", "bad dull"], [1, 0, 1, 0], "stub"
    )
    return iterative_deletion(KeywordStub(), corpus)


class TestFromRanking:
    def test_n_zero(self, ranking):
        assert from_ranking(ranking, 0).tokens == ()

    def test_full_size_keeps_order(self, ranking):
        lst = from_ranking(ranking, len(ranking.entries))
        assert list(lst) == ranking.tokens()

    def test_n_too_large(self, ranking):
        with pytest.raises(DataError, match="exceeds"):
            from_ranking(ranking, 99)

    def test_prefix_monotonicity(self, ranking):
        for n in range(len(ranking.entries)):
            smaller = set(from_ranking(ranking, n).tokens)
            larger = set(from_ranking(ranking, n + 1).tokens)
            assert smaller <= larger

    def test_trace_uses_trace_order(self):
        corpus = Corpus.from_texts(
            ["good fun", "meh slow", "good nice", "bad dull"], [1, 0, 1, 0]
        )
        trace = recursive_deletion(KeywordStub(), corpus, k=3)
        lst = from_ranking(trace, 2)
        assert list(lst) == trace.tokens()[:2]
        assert lst.provenance["method"] == "recursive"

    def test_provenance(self, ranking):
        lst = from_ranking(ranking, 3)
        assert lst.provenance["method"] == "iterative"
        assert lst.provenance["n"] == 3
        assert lst.provenance["source"]["scorer"] == "stub-keywords"


class TestMerge:
    def test_self_merge_is_identity(self):
        lst = StopwordList(("a", "b"), {"name": "x"})
        assert merge([lst, lst]).tokens == ("a", "b")

    def test_dedup_keeps_first_occurrence(self):
        a = StopwordList(("a", "b"), {"name": "a"})
        b = StopwordList(("b", "c"), {"name": "b"})
        assert merge([a, b]).tokens == ("a", "b", "c")

    def test_empty_is_identity(self):
        empty = StopwordList((), {"name": "empty"})
        lst = StopwordList(("x", "y"), {"name": "l"})
        assert merge([empty, lst]).tokens == ("x", "y")

    def test_associative_up_to_set(self):
        rng = random.Random(31)
        universe = [f"t{i}" for i in range(12)]
        for _ in range(25):
            parts = [
                StopwordList(tuple(rng.sample(universe, rng.randint(0, 6))))
                for _ in range(3)
            ]
            left = merge([merge(parts[:2]), parts[2]])
            right = merge([parts[0], merge(parts[1:])])
            assert set(left.tokens) == set(right.tokens)
            assert len(set(left.tokens)) == len(left.tokens)

    def test_requires_input(self):
        with pytest.raises(DataError):
            merge([])


class TestListFiles:
    def test_roundtrip(self, tmp_path):
        lst = StopwordList(("alpha", "beta", "gamma"), {"name": "trip"})
        path = tmp_path / "words.txt"
        save_list(lst, path)
        loaded = load_list(path)
        assert loaded.tokens == lst.tokens
        assert loaded.provenance == lst.provenance

    def test_saved_bytes_are_lf_no_bom(self, tmp_path):
        path = tmp_path / "words.txt"
        save_list(StopwordList(("one", "two")), path)
        data = path.read_bytes()
        assert data == b"one\ntwo\n"

    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "list.txt"
        path.write_text("# header\n\nalpha\n  \n# more\nbeta\n", encoding="utf-8")
        assert load_list(path).tokens == ("alpha", "beta")

    def test_token_with_whitespace_reports_line(self, tmp_path):
        path = tmp_path / "list.txt"
        path.write_text("fine\ntwo words\n", encoding="utf-8")
        with pytest.raises(DataError, match="line 2"):
            load_list(path)

    def test_uppercase_rejected(self, tmp_path):
        path = tmp_path / "list.txt"
        path.write_text("Fine\n", encoding="utf-8")
        with pytest.raises(DataError, match="lowercase"):
            load_list(path)

    def test_punctuation_rejected(self, tmp_path):
        path = tmp_path / "list.txt"
        path.write_text("n't\n", encoding="utf-8")
        with pytest.raises(DataError, match="punctuation"):
            load_list(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_list(tmp_path / "nope.txt")


class TestInvariants:
    def test_duplicates_rejected(self):
        with pytest.raises(DataError, match="duplicate"):
            StopwordList(("a", "a"))

    def test_dirty_tokens_rejected(self):
        with pytest.raises(DataError):
            StopwordList(("Hello",))
        with pytest.raises(DataError):
            StopwordList(("don't",))
        with pytest.raises(DataError):
            StopwordList(("",))


class TestBaseline:
    def test_bundled_list_is_pinned(self):
        lst = baseline_list()
        assert len(lst) == 318
        assert lst.provenance["method"] == "baseline"
        assert len(lst.provenance["fingerprint"]) == 64
        assert "the" in lst
        assert "whereupon" in lst

    def test_merge_with_generated(self, ranking):
        generated = from_ranking(ranking, 5)
        merged = merge([generated, baseline_list()])
        assert len(merged) <= 5 + 318
        assert list(merged)[:5] == list(generated)
