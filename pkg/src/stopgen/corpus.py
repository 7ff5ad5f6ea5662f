"""Corpus ingestion, tokenization, vocabulary counts and token deletion.

Deletion works on token sequences, never on raw strings: removing a token
rewrites each document's token tuple and the scoring text is rebuilt by
joining the remaining tokens with single spaces.  That makes deletion exact,
order-independent and free of double-space artifacts.
"""

from __future__ import annotations

import csv
import hashlib
from collections import Counter
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import CorpusFormatError

# The 32 ASCII symbols stripped before splitting.  Characters are deleted,
# not replaced by spaces, so "-lrb-" becomes "lrb" and "n't" becomes "nt".
PUNCTUATION = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~"

_DROP_PUNCT = str.maketrans("", "", PUNCTUATION)


def tokenize(text: str) -> list[str]:
    """Lowercase, delete ASCII punctuation, split on whitespace runs.

    Total function: any input is accepted and empty fragments are dropped.
    """
    return text.lower().translate(_DROP_PUNCT).split()


@dataclass(frozen=True)
class Document:
    """One labeled text record.

    ``tokens`` starts out as ``tokenize(raw_text)`` and shrinks under
    deletion; ``raw_text`` keeps the original string for reference.
    """

    id: int
    raw_text: str
    tokens: tuple[str, ...]
    label: int

    @property
    def text(self) -> str:
        """Surface text used for scoring: tokens joined by single spaces."""
        return " ".join(self.tokens)


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable collection of documents."""

    documents: tuple[Document, ...]
    split_name: str = ""

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def labels(self) -> list[int]:
        return [doc.label for doc in self.documents]

    def texts(self) -> list[str]:
        return [doc.text for doc in self.documents]

    def total_tokens(self) -> int:
        return sum(len(doc.tokens) for doc in self.documents)

    def total_chars(self) -> int:
        """Characters of the space-joined scoring text, summed over documents."""
        return sum(len(doc.text) for doc in self.documents)

    def fingerprint(self) -> str:
        """Content hash covering split name, ids, labels and token sequences."""
        h = hashlib.sha256()
        h.update(self.split_name.encode("utf-8"))
        h.update(b"\x00")
        for doc in self.documents:
            h.update(f"{doc.id}\x1f{doc.label}\x1f".encode("utf-8"))
            h.update("\x1e".join(doc.tokens).encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()

    @classmethod
    def from_texts(
        cls,
        texts: Sequence[str],
        labels: Sequence[int],
        split_name: str = "",
    ) -> "Corpus":
        """Build a corpus in memory, tokenizing each text."""
        if len(texts) != len(labels):
            raise ValueError("texts and labels must have the same length")
        docs = []
        for i, (text, label) in enumerate(zip(texts, labels)):
            if label not in (0, 1):
                raise ValueError(f"label must be 0 or 1, got {label!r}")
            docs.append(Document(i, text, tuple(tokenize(text)), int(label)))
        return cls(tuple(docs), split_name)


class VocabEntry(NamedTuple):
    token: str
    term_frequency: int
    document_frequency: int


@dataclass(frozen=True)
class Vocabulary:
    """Unique corpus tokens with exact tf/df counts, sorted by token."""

    entries: tuple[VocabEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, token: str) -> bool:
        return token in self._by_token

    @cached_property
    def _by_token(self) -> dict[str, VocabEntry]:
        return {entry.token: entry for entry in self.entries}

    def tokens(self) -> list[str]:
        return [entry.token for entry in self.entries]

    def term_frequency(self, token: str) -> int:
        return self._by_token[token].term_frequency

    def document_frequency(self, token: str) -> int:
        return self._by_token[token].document_frequency

    def total_term_count(self) -> int:
        return sum(entry.term_frequency for entry in self.entries)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for entry in self.entries:
            h.update(
                f"{entry.token}\x1f{entry.term_frequency}"
                f"\x1f{entry.document_frequency}\n".encode("utf-8")
            )
        return h.hexdigest()


def build_vocabulary(corpus: Corpus) -> Vocabulary:
    """Count term and document frequencies over the whole corpus."""
    tf: Counter[str] = Counter()
    df: Counter[str] = Counter()
    for doc in corpus:
        tf.update(doc.tokens)
        df.update(set(doc.tokens))
    entries = tuple(
        VocabEntry(token, tf[token], df[token]) for token in sorted(tf)
    )
    return Vocabulary(entries)


def load_corpus(
    path: str | Path,
    fmt: str = "tsv",
    text_col: str = "sentence",
    label_col: str = "label",
    split_name: str | None = None,
) -> Corpus:
    """Read a delimited file with a header row into a Corpus.

    ``fmt`` selects the delimiter: "tsv" (unquoted, tab) or "csv" (RFC-4180).
    Labels must be the literal strings "0" or "1"; anything else is reported
    with its line number.
    """
    if fmt not in ("tsv", "csv"):
        raise ValueError(f"format must be 'tsv' or 'csv', got {fmt!r}")
    path = Path(path)
    if not path.is_file():
        raise CorpusFormatError(f"corpus file not found: {path}")

    docs: list[Document] = []
    with path.open("r", encoding="utf-8-sig", newline="") as handle:
        if fmt == "tsv":
            reader = csv.reader(handle, delimiter="\t", quoting=csv.QUOTE_NONE)
        else:
            reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusFormatError(f"{path}: file is empty (missing header row)")
        try:
            text_idx = header.index(text_col)
            label_idx = header.index(label_col)
        except ValueError:
            raise CorpusFormatError(
                f"{path}: header must contain columns {text_col!r} and "
                f"{label_col!r}; found {header!r}"
            )
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            if len(row) <= max(text_idx, label_idx):
                raise CorpusFormatError(
                    f"{path}: row at line {line} has {len(row)} fields, "
                    f"expected at least {max(text_idx, label_idx) + 1}"
                )
            raw_label = row[label_idx].strip()
            if raw_label not in ("0", "1"):
                raise CorpusFormatError(
                    f"{path}: row at line {line} has label {raw_label!r}, "
                    "expected 0 or 1"
                )
            text = row[text_idx]
            docs.append(
                Document(len(docs), text, tuple(tokenize(text)), int(raw_label))
            )
    return Corpus(tuple(docs), split_name if split_name is not None else path.stem)


def delete_token(corpus: Corpus, token: str) -> Corpus:
    """Remove every occurrence of ``token`` from every document.

    Document count, ids, order and labels are unchanged; documents may end
    up with zero tokens and are retained in that state.
    """
    docs = tuple(
        replace(doc, tokens=tuple(t for t in doc.tokens if t != token))
        if token in doc.tokens
        else doc
        for doc in corpus.documents
    )
    return Corpus(docs, corpus.split_name)


def delete_tokens(corpus: Corpus, tokens: Iterable[str]) -> Corpus:
    """Remove every occurrence of every token in ``tokens``.

    Equivalent to folding :func:`delete_token` over the set in any order.
    """
    drop = frozenset(tokens)
    if not drop:
        return corpus
    docs = tuple(
        replace(doc, tokens=tuple(t for t in doc.tokens if t not in drop))
        if any(t in drop for t in doc.tokens)
        else doc
        for doc in corpus.documents
    )
    return Corpus(docs, corpus.split_name)
