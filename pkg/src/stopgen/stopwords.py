"""Stopword lists: construction from rankings, merging and file I/O.

The file format is one token per line, '#' starts a comment, blank lines are
skipped.  Files are written UTF-8 with LF endings and no BOM so a list saved
anywhere is byte-identical everywhere.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from .corpus import PUNCTUATION
from .deletion import ImportanceRanking, RecursiveTrace
from .errors import DataError

_PUNCT_SET = frozenset(PUNCTUATION)

BASELINE_LIST_NAME = "english-baseline"


def _check_token(token: str, where: str) -> None:
    if not token:
        raise DataError(f"{where}: empty token")
    if any(ch.isspace() for ch in token):
        raise DataError(f"{where}: token {token!r} contains whitespace")
    if token != token.lower():
        raise DataError(f"{where}: token {token!r} is not lowercase")
    if any(ch in _PUNCT_SET for ch in token):
        raise DataError(f"{where}: token {token!r} contains punctuation")


@dataclass(frozen=True)
class StopwordList:
    """Ordered, duplicate-free token list with provenance metadata."""

    tokens: tuple[str, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for token in self.tokens:
            _check_token(token, "stopword list")
            if token in seen:
                raise DataError(f"stopword list contains duplicate {token!r}")
            seen.add(token)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.tokens

    @property
    def name(self) -> str:
        return str(self.provenance.get("name", "stopwords"))


def from_ranking(
    ranking: ImportanceRanking | RecursiveTrace, n: int
) -> StopwordList:
    """The n least important tokens, in ranking (or trace) order."""
    tokens = ranking.tokens()
    if n < 0:
        raise DataError(f"n must be non-negative, got {n}")
    if n > len(tokens):
        raise DataError(
            f"n={n} exceeds the {len(tokens)} tokens available in the ranking"
        )
    if isinstance(ranking, RecursiveTrace):
        method = "recursive"
    else:
        method = "iterative"
    provenance = {
        "name": f"{method}-{n}",
        "method": method,
        "n": n,
        "source": {
            key: ranking.metadata.get(key)
            for key in ("scorer", "corpus_fingerprint", "corpus_split")
            if key in ranking.metadata
        },
    }
    return StopwordList(tuple(tokens[:n]), provenance)


def merge(lists: Sequence[StopwordList]) -> StopwordList:
    """Concatenate in argument order, keeping each token's first occurrence."""
    if not lists:
        raise DataError("merge requires at least one stopword list")
    seen = set()
    tokens: list[str] = []
    for lst in lists:
        for token in lst.tokens:
            if token not in seen:
                seen.add(token)
                tokens.append(token)
    provenance = {
        "name": "+".join(lst.name for lst in lists),
        "method": "merged",
        "sources": [lst.provenance for lst in lists],
    }
    if len(lists) == 1:
        provenance = dict(lists[0].provenance)
    return StopwordList(tuple(tokens), provenance)


def save_list(stopwords: StopwordList, path: str | Path) -> None:
    """Write tokens one per line plus a .meta.json provenance sidecar."""
    path = Path(path)
    body = "".join(token + "\n" for token in stopwords.tokens)
    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(body)
    meta = {"count": len(stopwords), "provenance": stopwords.provenance}
    Path(str(path) + ".meta.json").write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8"
    )


def load_list(path: str | Path) -> StopwordList:
    """Parse a stopword file; comments and blank lines are skipped."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"stopword list not found: {path}")
    tokens: list[str] = []
    seen = set()
    with path.open("r", encoding="utf-8-sig") as handle:
        for line_num, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            _check_token(stripped, f"{path}, line {line_num}")
            if stripped in seen:
                continue
            seen.add(stripped)
            tokens.append(stripped)

    provenance: dict = {"name": path.stem, "method": "file", "path": str(path)}
    meta_path = Path(str(path) + ".meta.json")
    if meta_path.is_file():
        try:
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            if isinstance(meta, dict) and isinstance(meta.get("provenance"), dict):
                provenance = meta["provenance"]
        except json.JSONDecodeError:
            pass
    return StopwordList(tuple(tokens), provenance)


def baseline_list() -> StopwordList:
    """The bundled 318-token baseline English list, fingerprinted."""
    data = (
        resources.files("stopgen")
        .joinpath("data/english_stopwords.txt")
        .read_bytes()
    )
    tokens = tuple(
        line
        for line in data.decode("utf-8").splitlines()
        if line and not line.startswith("#")
    )
    provenance = {
        "name": BASELINE_LIST_NAME,
        "method": "baseline",
        "fingerprint": hashlib.sha256(data).hexdigest(),
    }
    return StopwordList(tokens, provenance)
