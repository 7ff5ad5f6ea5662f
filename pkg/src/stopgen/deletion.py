"""Token-importance engines.

Iterative mode scores every single-token deletion against a fixed baseline;
recursive mode repeats a full pass after each removal, greedily peeling off
the currently least important token.

The expensive resource is the scorer, so a per-document score cache is kept:
deleting a token can only change the documents that contain it, and with a
deterministic scorer rescoring just those documents yields results identical
to rescoring the whole corpus.  Long runs persist progress to a JSON
checkpoint guarded by a fingerprint of corpus, vocabulary, scorer and engine
version.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ._version import __version__ as ENGINE_VERSION
from .corpus import Corpus, Vocabulary, build_vocabulary, delete_tokens
from .errors import CheckpointError, DataError, ScorerError
from .metrics import roc_auc
from . import kernels

log = logging.getLogger(__name__)

TIE_BREAK_RULE = "largest delta_auc first; ties broken by token ascending"

# Warn before a recursive run that would exceed this many document scorings.
DEFAULT_SCORING_BUDGET = 5_000_000

CHECKPOINT_FORMAT = 1


@dataclass(frozen=True)
class RankedToken:
    """One vocabulary token with its measured AUC change.

    ``delta_auc`` is AUC(after deletion) - AUC(baseline); ``importance`` is
    its negation, so the least important token has the smallest importance
    and rank 1.
    """

    rank: int
    token: str
    delta_auc: float
    importance: float


@dataclass(frozen=True)
class ImportanceRanking:
    baseline_auc: float
    entries: tuple[RankedToken, ...]
    metadata: dict

    def tokens(self) -> list[str]:
        """Tokens in least-important-first order."""
        return [entry.token for entry in self.entries]


@dataclass(frozen=True)
class TraceStep:
    step: int
    token: str
    delta_auc: float
    corpus_auc: float


@dataclass(frozen=True)
class RecursiveTrace:
    baseline_auc: float
    steps: tuple[TraceStep, ...]
    metadata: dict

    def tokens(self) -> list[str]:
        """Stopwords in removal order (least important first)."""
        return [step.token for step in self.steps]


@dataclass
class _Evaluation:
    token: str
    delta: float
    auc: float
    doc_positions: np.ndarray | None = None
    rescored: np.ndarray | None = None


ProgressFn = Callable[[int, int], None]


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _validate_two_classes(corpus: Corpus) -> np.ndarray:
    labels = np.ascontiguousarray(corpus.labels(), dtype=np.int8)
    if labels.size == 0 or not (np.any(labels == 0) and np.any(labels == 1)):
        raise DataError(
            f"split {corpus.split_name!r} must contain documents of both classes"
        )
    return labels


def _score_texts(scorer, texts: Sequence[str], batch_size: int) -> np.ndarray:
    """Score texts through the handle in batches, validating each response."""
    scores = np.empty(len(texts), dtype=np.float64)
    for start in range(0, len(texts), batch_size):
        chunk = texts[start : start + batch_size]
        returned = scorer.score_batch(chunk)
        if len(returned) != len(chunk):
            raise ScorerError(
                f"scorer {getattr(scorer, 'name', scorer)!r} returned "
                f"{len(returned)} scores for {len(chunk)} texts"
            )
        scores[start : start + len(chunk)] = returned
    if scores.size and not np.all((scores >= 0.0) & (scores <= 1.0)):
        raise ScorerError(
            f"scorer {getattr(scorer, 'name', scorer)!r} returned scores "
            "outside [0, 1]"
        )
    return scores


def _containing_documents(
    corpus: Corpus, tokens: set[str]
) -> dict[str, list[int]]:
    """Inverted index: token -> positions of documents containing it."""
    index: dict[str, list[int]] = {}
    for position, doc in enumerate(corpus.documents):
        for token in set(doc.tokens):
            if token in tokens:
                index.setdefault(token, []).append(position)
    return index


def engine_fingerprint(corpus: Corpus, vocab: Vocabulary, scorer) -> dict:
    return {
        "corpus": corpus.fingerprint(),
        "vocabulary": vocab.fingerprint(),
        "scorer": getattr(scorer, "name", str(scorer)),
        "engine_version": ENGINE_VERSION,
    }


# ---------------------------------------------------------------------------
# Checkpoints

def write_checkpoint(state: dict, path: str | Path) -> None:
    """Atomically persist engine state as JSON (write then rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(state), encoding="utf-8")
    os.replace(tmp, path)


def read_checkpoint(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        state = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"checkpoint {path} is not valid JSON: {exc}")
    if not isinstance(state, dict) or "fingerprint" not in state:
        raise CheckpointError(f"checkpoint {path} has no fingerprint")
    return state


def _verify_checkpoint(
    state: dict, kind: str, fingerprint: dict, path: str | Path
) -> None:
    if state.get("kind") != kind:
        raise CheckpointError(
            f"checkpoint {path} was written by a {state.get('kind')!r} run, "
            f"not {kind!r}"
        )
    stored = state.get("fingerprint", {})
    mismatched = [
        f"  {key}: checkpoint has {stored.get(key)!r}, current run has {value!r}"
        for key, value in fingerprint.items()
        if stored.get(key) != value
    ]
    if mismatched:
        raise CheckpointError(
            f"checkpoint {path} does not match this run, refusing to resume:\n"
            + "\n".join(mismatched)
        )


# ---------------------------------------------------------------------------
# Shared evaluation pass

# Tokens evaluated per kernel call: the sorted baseline is shared across a
# chunk, so one argsort amortizes over up to this many candidates.
KERNEL_CHUNK = 64


def _run_pass(
    scorer,
    docs: tuple,
    labels: np.ndarray,
    base_scores: np.ndarray,
    baseline_auc: float,
    tokens: Sequence[str],
    index: dict[str, list[int]],
    *,
    batch_size: int,
    workers: int,
    chunk_size: int = KERNEL_CHUNK,
    keep_updates: bool = False,
    on_result: Callable[[_Evaluation], None] | None = None,
) -> dict[str, _Evaluation]:
    """Evaluate the deletion of each token against the cached baseline.

    Only documents containing the token are rescored; the remaining scores
    are reused from ``base_scores``.  Tokens are processed in chunks that
    share one batched AUC kernel call.  Worker count and chunking never
    change results: every candidate is independent and ordering is imposed
    afterwards by the ranking sort.
    """

    def evaluate_chunk(chunk: Sequence[str]) -> list[_Evaluation]:
        scored: list[tuple[str, np.ndarray | None, np.ndarray | None]] = []
        for token in chunk:
            positions = index.get(token)
            if not positions:
                # deletion is a no-op: delta is exactly 0, nothing is scored
                scored.append((token, None, None))
                continue
            texts = [
                " ".join(t for t in docs[p].tokens if t != token)
                for p in positions
            ]
            try:
                rescored = _score_texts(scorer, texts, batch_size)
            except ScorerError as exc:
                raise type(exc)(
                    f"while evaluating deletion of {token!r}: {exc}"
                ) from exc
            scored.append(
                (token, np.asarray(positions, dtype=np.int64), rescored)
            )

        updated = [(idx, new) for _, idx, new in scored if idx is not None]
        if updated:
            sizes = np.fromiter((idx.size for idx, _ in updated), np.int64,
                                count=len(updated))
            offsets = np.concatenate(([0], np.cumsum(sizes)))
            aucs = kernels.auc_batch_updated(
                base_scores,
                labels,
                np.concatenate([idx for idx, _ in updated]),
                np.concatenate([new for _, new in updated]),
                offsets,
            )

        out: list[_Evaluation] = []
        position = 0
        for token, idx, rescored in scored:
            if idx is None:
                out.append(_Evaluation(token, 0.0, baseline_auc))
                continue
            auc = float(aucs[position])
            position += 1
            out.append(
                _Evaluation(
                    token,
                    auc - baseline_auc,
                    auc,
                    idx if keep_updates else None,
                    rescored if keep_updates else None,
                )
            )
        return out

    chunk_size = max(1, chunk_size)
    chunks = [
        tokens[start : start + chunk_size]
        for start in range(0, len(tokens), chunk_size)
    ]
    results: dict[str, _Evaluation] = {}

    def collect(outcomes: list[_Evaluation]) -> None:
        for outcome in outcomes:
            results[outcome.token] = outcome
            if on_result is not None:
                on_result(outcome)

    if workers <= 1:
        for chunk in chunks:
            collect(evaluate_chunk(chunk))
        return results

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(evaluate_chunk, chunk) for chunk in chunks]
        try:
            for future in as_completed(futures):
                collect(future.result())
        except BaseException:
            for future in futures:
                future.cancel()
            raise
    return results


def _ranked_entries(deltas: dict[str, float]) -> tuple[RankedToken, ...]:
    """Sort by importance ascending (= delta descending), token ascending."""
    ordered = sorted(deltas.items(), key=lambda item: (0.0 - item[1], item[0]))
    return tuple(
        RankedToken(rank, token, delta, 0.0 - delta)
        for rank, (token, delta) in enumerate(ordered, start=1)
    )


# ---------------------------------------------------------------------------
# Iterative deletion

def iterative_deletion(
    scorer,
    corpus: Corpus,
    vocab: Vocabulary | None = None,
    *,
    batch_size: int = 32,
    workers: int = 1,
    checkpoint_path: str | Path | None = None,
    checkpoint_every: int = 100,
    resume: bool = False,
    progress: ProgressFn | None = None,
) -> ImportanceRanking:
    """Rank every vocabulary token by the AUC change its deletion causes.

    With a checkpoint path, progress is persisted every ``checkpoint_every``
    completed tokens; ``resume=True`` picks up a matching checkpoint instead
    of re-evaluating finished tokens.
    """
    labels = _validate_two_classes(corpus)
    if vocab is None:
        vocab = build_vocabulary(corpus)
    fingerprint = engine_fingerprint(corpus, vocab, scorer)

    state = None
    if resume and checkpoint_path is not None and Path(checkpoint_path).is_file():
        state = read_checkpoint(checkpoint_path)
        _verify_checkpoint(state, "iterative", fingerprint, checkpoint_path)
        log.info(
            "resuming iterative run from %s (%d tokens already done)",
            checkpoint_path,
            len(state["deltas"]),
        )

    if state is not None:
        base_scores = np.asarray(state["baseline_scores"], dtype=np.float64)
        baseline_auc = float(state["baseline_auc"])
        deltas = {str(k): float(v) for k, v in state["deltas"].items()}
    else:
        base_scores = _score_texts(scorer, corpus.texts(), batch_size)
        baseline_auc = roc_auc(base_scores, labels)
        deltas = {}

    tokens = vocab.tokens()
    pending = [t for t in tokens if t not in deltas]
    index = _containing_documents(corpus, set(pending))

    def persist(complete: bool) -> None:
        if checkpoint_path is None:
            return
        write_checkpoint(
            {
                "kind": "iterative",
                "format": CHECKPOINT_FORMAT,
                "fingerprint": fingerprint,
                "baseline_auc": baseline_auc,
                "baseline_scores": base_scores.tolist(),
                "deltas": deltas,
                "complete": complete,
                "written_at": _utc_now(),
            },
            checkpoint_path,
        )

    completed_since_persist = 0

    def on_result(outcome: _Evaluation) -> None:
        nonlocal completed_since_persist
        deltas[outcome.token] = outcome.delta
        completed_since_persist += 1
        if checkpoint_every > 0 and completed_since_persist >= checkpoint_every:
            persist(False)
            completed_since_persist = 0
        if progress is not None:
            progress(len(deltas), len(tokens))

    # durable progress comes in chunk quanta, so align chunking with the
    # requested checkpoint cadence
    chunk_size = KERNEL_CHUNK
    if checkpoint_path is not None and checkpoint_every > 0:
        chunk_size = min(KERNEL_CHUNK, checkpoint_every)

    if pending:
        _run_pass(
            scorer,
            corpus.documents,
            labels,
            base_scores,
            baseline_auc,
            pending,
            index,
            batch_size=batch_size,
            workers=workers,
            chunk_size=chunk_size,
            on_result=on_result,
        )
    persist(True)

    metadata = {
        "mode": "iterative",
        "scorer": fingerprint["scorer"],
        "corpus_split": corpus.split_name,
        "corpus_fingerprint": fingerprint["corpus"],
        "vocabulary_fingerprint": fingerprint["vocabulary"],
        "engine_version": ENGINE_VERSION,
        "tie_break": TIE_BREAK_RULE,
        "documents": len(corpus),
        "vocabulary_size": len(tokens),
        "created_at": _utc_now(),
    }
    return ImportanceRanking(baseline_auc, _ranked_entries(deltas), metadata)


# ---------------------------------------------------------------------------
# Recursive deletion

def recursive_deletion(
    scorer,
    corpus: Corpus,
    vocab: Vocabulary | None = None,
    *,
    k: int,
    batch_size: int = 32,
    workers: int = 1,
    checkpoint_path: str | Path | None = None,
    resume: bool = False,
    progress: ProgressFn | None = None,
    scoring_budget: int | None = DEFAULT_SCORING_BUDGET,
) -> RecursiveTrace:
    """Greedily remove the currently least important token, k times.

    Each round runs a full iterative pass over the remaining vocabulary of
    the current (already reduced) corpus, selects the token with the largest
    delta (ties by token ascending), applies the deletion and carries the
    rescored documents forward as the next baseline.  Progress is persisted
    after every completed round.
    """
    labels = _validate_two_classes(corpus)
    if vocab is None:
        vocab = build_vocabulary(corpus)
    if not 1 <= k <= len(vocab):
        raise DataError(
            f"k must be between 1 and the vocabulary size ({len(vocab)}), got {k}"
        )
    fingerprint = engine_fingerprint(corpus, vocab, scorer)

    if scoring_budget is not None:
        projected = k * vocab.total_term_count()
        if projected > scoring_budget:
            log.warning(
                "recursive deletion with k=%d may need roughly %d document "
                "scorings (budget %d); consider iterative mode or a smaller k",
                k,
                projected,
                scoring_budget,
            )

    state = None
    if resume and checkpoint_path is not None and Path(checkpoint_path).is_file():
        state = read_checkpoint(checkpoint_path)
        _verify_checkpoint(state, "recursive", fingerprint, checkpoint_path)
        if state.get("k") != k:
            raise CheckpointError(
                f"checkpoint {checkpoint_path} was written for k="
                f"{state.get('k')}, not k={k}"
            )
        log.info(
            "resuming recursive run from %s (%d of %d rounds done)",
            checkpoint_path,
            len(state["steps"]),
            k,
        )

    if state is not None:
        baseline_auc = float(state["baseline_auc"])
        steps = [
            TraceStep(int(s["step"]), str(s["token"]), float(s["delta_auc"]),
                      float(s["corpus_auc"]))
            for s in state["steps"]
        ]
        current_scores = np.asarray(state["current_scores"], dtype=np.float64)
        removed = {step.token for step in steps}
        current_docs = delete_tokens(corpus, removed).documents
    else:
        current_scores = _score_texts(scorer, corpus.texts(), batch_size)
        baseline_auc = roc_auc(current_scores, labels)
        steps = []
        removed = set()
        current_docs = corpus.documents

    def persist(complete: bool) -> None:
        if checkpoint_path is None:
            return
        write_checkpoint(
            {
                "kind": "recursive",
                "format": CHECKPOINT_FORMAT,
                "fingerprint": fingerprint,
                "k": k,
                "baseline_auc": baseline_auc,
                "steps": [
                    {
                        "step": s.step,
                        "token": s.token,
                        "delta_auc": s.delta_auc,
                        "corpus_auc": s.corpus_auc,
                    }
                    for s in steps
                ],
                "current_scores": current_scores.tolist(),
                "complete": complete,
                "written_at": _utc_now(),
            },
            checkpoint_path,
        )

    remaining = [t for t in vocab.tokens() if t not in removed]
    current_auc = steps[-1].corpus_auc if steps else baseline_auc

    while len(steps) < k:
        index = _containing_documents(
            Corpus(current_docs, corpus.split_name), set(remaining)
        )
        results = _run_pass(
            scorer,
            current_docs,
            labels,
            current_scores,
            current_auc,
            remaining,
            index,
            batch_size=batch_size,
            workers=workers,
            keep_updates=True,
        )
        winner = min(
            results.values(), key=lambda r: (0.0 - r.delta, r.token)
        )
        steps.append(
            TraceStep(len(steps) + 1, winner.token, winner.delta, winner.auc)
        )
        remaining.remove(winner.token)

        if winner.doc_positions is not None:
            updated = current_scores.copy()
            updated[winner.doc_positions] = winner.rescored
            current_scores = updated
            docs = list(current_docs)
            for position in winner.doc_positions:
                doc = docs[position]
                docs[position] = replace(
                    doc,
                    tokens=tuple(t for t in doc.tokens if t != winner.token),
                )
            current_docs = tuple(docs)
        current_auc = winner.auc
        persist(False)
        if progress is not None:
            progress(len(steps), k)

    persist(True)
    metadata = {
        "mode": "recursive",
        "k": k,
        "scorer": fingerprint["scorer"],
        "corpus_split": corpus.split_name,
        "corpus_fingerprint": fingerprint["corpus"],
        "vocabulary_fingerprint": fingerprint["vocabulary"],
        "engine_version": ENGINE_VERSION,
        "tie_break": TIE_BREAK_RULE,
        "documents": len(corpus),
        "vocabulary_size": len(vocab),
        "created_at": _utc_now(),
    }
    return RecursiveTrace(baseline_auc, tuple(steps), metadata)


# ---------------------------------------------------------------------------
# Ranking file I/O (CSV plus JSON metadata sidecar)

RANKING_HEADER = ["rank", "token", "delta_auc", "importance"]
TRACE_HEADER = ["step", "token", "delta_auc", "corpus_auc"]


def sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + ".meta.json")


def write_ranking_csv(
    ranking: ImportanceRanking, path: str | Path, extra_metadata: dict | None = None
) -> None:
    """Write the ranking CSV and its JSON metadata sidecar.

    Floats are written with repr precision so re-running a deterministic
    engine reproduces the file byte for byte.
    """
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RANKING_HEADER)
        for entry in ranking.entries:
            writer.writerow(
                [entry.rank, entry.token, repr(entry.delta_auc),
                 repr(entry.importance)]
            )
    meta = {"baseline_auc": ranking.baseline_auc, **ranking.metadata}
    if extra_metadata:
        meta.update(extra_metadata)
    sidecar_path(path).write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8"
    )


def write_trace_csv(
    trace: RecursiveTrace, path: str | Path, extra_metadata: dict | None = None
) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for step in trace.steps:
            writer.writerow(
                [step.step, step.token, repr(step.delta_auc),
                 repr(step.corpus_auc)]
            )
    meta = {"baseline_auc": trace.baseline_auc, **trace.metadata}
    if extra_metadata:
        meta.update(extra_metadata)
    sidecar_path(path).write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8"
    )


def read_ranking_csv(path: str | Path) -> ImportanceRanking | RecursiveTrace:
    """Load a ranking or trace CSV (detected by header) with its sidecar."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"ranking file not found: {path}")
    metadata: dict = {}
    side = sidecar_path(path)
    if side.is_file():
        try:
            metadata = json.loads(side.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            log.warning("ignoring unreadable metadata sidecar %s", side)
    baseline = float(metadata.get("baseline_auc", "nan"))

    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty ranking file")
        rows = [row for row in reader if row]

    try:
        if header == RANKING_HEADER:
            entries = tuple(
                RankedToken(int(rank), token, float(delta), float(importance))
                for rank, token, delta, importance in rows
            )
            return ImportanceRanking(baseline, entries, metadata)
        if header == TRACE_HEADER:
            steps = tuple(
                TraceStep(int(step), token, float(delta), float(auc))
                for step, token, delta, auc in rows
            )
            return RecursiveTrace(baseline, steps, metadata)
    except ValueError as exc:
        raise DataError(f"{path}: malformed ranking row ({exc})")
    raise DataError(
        f"{path}: unrecognized header {header!r}; expected "
        f"{RANKING_HEADER} or {TRACE_HEADER}"
    )
