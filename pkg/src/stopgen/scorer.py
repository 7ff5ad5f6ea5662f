"""Scoring models: text in, positive-class probability out.

Two implementations of the same handle contract:

* ``BuiltinScorer`` — TF-IDF features (raw counts x smoothed idf, L2 row
  normalization, unigrams) into an L2-regularized logistic regression,
  trained here with a deterministic L-BFGS run over an analytic gradient.
* ``ExternalScorerPool`` — a pool of child processes speaking a
  newline-delimited JSON protocol on stdin/stdout, for plugging in models
  this package does not ship (transformers, remote services, test stubs).

Every handle must be deterministic: identical texts yield identical scores.
"""

from __future__ import annotations

import json
import shlex
import subprocess
import threading
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize
from scipy.special import expit

from .corpus import Corpus, build_vocabulary, tokenize
from .errors import ProtocolError, ScorerError

PROTOCOL_VERSION = 1


# ---------------------------------------------------------------------------
# TF-IDF

@dataclass(frozen=True)
class TfidfVectorizer:
    """Token -> column mapping plus smoothed idf weights.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1 with N the number of training
    documents, so every weight is >= 1 and finite.
    """

    vocabulary: dict[str, int]
    idf: np.ndarray
    n_documents: int


def fit_tfidf(corpus: Corpus) -> TfidfVectorizer:
    """Fit vocabulary (lexicographic column order) and idf weights."""
    if len(corpus) == 0:
        raise ValueError("cannot fit a TF-IDF vectorizer on an empty corpus")
    vocab = build_vocabulary(corpus)
    mapping = {entry.token: i for i, entry in enumerate(vocab.entries)}
    df = np.array([e.document_frequency for e in vocab.entries], dtype=np.float64)
    idf = np.log((1.0 + len(corpus)) / (1.0 + df)) + 1.0
    return TfidfVectorizer(mapping, idf, len(corpus))


def transform_many(
    vectorizer: TfidfVectorizer, token_lists: Sequence[Sequence[str]]
) -> sp.csr_matrix:
    """Sparse feature matrix: per row, count * idf then L2-normalized.

    Out-of-vocabulary tokens are ignored; a row with no known tokens stays
    all-zero.
    """
    vocab = vectorizer.vocabulary
    idf = vectorizer.idf
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for tokens in token_lists:
        counts = Counter(tokens)
        cols = sorted(
            (vocab[t], c) for t, c in counts.items() if t in vocab
        )
        if cols:
            values = np.array([c * idf[j] for j, c in cols], dtype=np.float64)
            norm = float(np.sqrt(np.dot(values, values)))
            if norm > 0.0:
                values /= norm
            indices.extend(j for j, _ in cols)
            data.extend(values)
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(data, dtype=np.float64),
         np.array(indices, dtype=np.int64),
         np.array(indptr, dtype=np.int64)),
        shape=(len(token_lists), len(vocab)),
    )


def transform(
    vectorizer: TfidfVectorizer, tokens: Sequence[str]
) -> sp.csr_matrix:
    """Feature vector (1 x n_features) for a single token sequence."""
    return transform_many(vectorizer, [tokens])


# ---------------------------------------------------------------------------
# Logistic regression

@dataclass(frozen=True)
class LogRegConfig:
    C: float = 1.0
    tol: float = 1e-6
    max_iter: int = 1000

    def as_dict(self) -> dict:
        return {"C": self.C, "tol": self.tol, "max_iter": self.max_iter}


@dataclass(frozen=True)
class LogRegModel:
    """Trained weights plus convergence diagnostics.

    ``final_grad_norm`` is the max-abs component of the objective gradient
    at the returned point; ``converged`` records whether it met the
    configured tolerance before ``max_iter``.
    """

    weights: np.ndarray
    bias: float
    config: LogRegConfig
    converged: bool
    final_grad_norm: float
    n_iter: int


def logreg_objective(
    features: sp.spmatrix | np.ndarray,
    signs: np.ndarray,
    C: float,
) -> Callable[[np.ndarray], tuple[float, np.ndarray]]:
    """Objective 0.5*||w||^2 + C * sum log(1 + exp(-y*(Xw + b))).

    ``signs`` must be +/-1.  Returns a function mapping theta = [w, b] to
    (value, gradient); the bias is unpenalized.
    """
    n_features = features.shape[1]

    def fun(theta: np.ndarray) -> tuple[float, np.ndarray]:
        w = theta[:n_features]
        b = theta[n_features]
        margins = signs * (features @ w + b)
        value = 0.5 * float(np.dot(w, w)) + C * float(
            np.logaddexp(0.0, -margins).sum()
        )
        # d/dm log(1+exp(-m)) = -sigmoid(-m)
        pull = -signs * expit(-margins)
        grad = np.empty(n_features + 1, dtype=np.float64)
        grad[:n_features] = w + C * (features.T @ pull)
        grad[n_features] = C * float(pull.sum())
        return value, grad

    return fun


def train_logreg(
    features: sp.spmatrix | np.ndarray,
    labels: Sequence[int] | np.ndarray,
    config: LogRegConfig | None = None,
    *,
    init: np.ndarray | None = None,
) -> LogRegModel:
    """Deterministically minimize the convex objective with L-BFGS.

    ``init`` overrides the zero starting point (diagnostics only; the
    objective is convex, so the optimum does not depend on it).
    """
    cfg = config or LogRegConfig()
    y = np.ascontiguousarray(labels, dtype=np.int8)
    n_samples, n_features = features.shape
    if y.shape[0] != n_samples:
        raise ValueError("labels length does not match feature rows")
    if not (np.any(y == 0) and np.any(y == 1)):
        raise ValueError("training requires at least one example of each class")
    signs = np.where(y == 1, 1.0, -1.0)

    objective = logreg_objective(features, signs, cfg.C)
    theta0 = np.zeros(n_features + 1) if init is None else np.asarray(init, float)
    if theta0.shape != (n_features + 1,):
        raise ValueError("init must have shape (n_features + 1,)")

    result = minimize(
        objective,
        theta0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": cfg.max_iter, "gtol": cfg.tol, "ftol": 1e-12},
    )
    _, grad = objective(result.x)
    grad_norm = float(np.max(np.abs(grad))) if grad.size else 0.0
    return LogRegModel(
        weights=result.x[:n_features].copy(),
        bias=float(result.x[n_features]),
        config=cfg,
        converged=grad_norm <= cfg.tol,
        final_grad_norm=grad_norm,
        n_iter=int(result.nit),
    )


def predict_proba_many(
    model: LogRegModel, features: sp.spmatrix | np.ndarray
) -> np.ndarray:
    """Sigmoid(Xw + b) for each feature row."""
    if features.shape[1] != model.weights.shape[0]:
        raise ValueError(
            f"feature dimension {features.shape[1]} does not match model "
            f"dimension {model.weights.shape[0]}"
        )
    margins = features @ model.weights + model.bias
    return expit(np.asarray(margins, dtype=np.float64))


def predict_proba(
    model: LogRegModel, vector: sp.spmatrix | np.ndarray
) -> float:
    """Positive-class probability for a single feature vector."""
    if sp.issparse(vector):
        return float(predict_proba_many(model, vector)[0])
    arr = np.asarray(vector, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return float(predict_proba_many(model, arr)[0])


# ---------------------------------------------------------------------------
# Built-in scorer handle

class BuiltinScorer:
    """Deterministic TF-IDF + logistic-regression scorer.

    Immutable after construction and safe for concurrent ``score_batch``
    calls.  Incoming text is tokenized with the same tokenizer used for
    corpus ingestion.
    """

    name = "builtin-tfidf-logreg"
    concurrency_safe = True

    def __init__(self, vectorizer: TfidfVectorizer, model: LogRegModel):
        self.vectorizer = vectorizer
        self.model = model

    def score_batch(self, texts: Sequence[str]) -> list[float]:
        token_lists = [tokenize(text) for text in texts]
        features = transform_many(self.vectorizer, token_lists)
        return [float(p) for p in predict_proba_many(self.model, features)]


def builtin_scorer(
    train_corpus: Corpus, config: LogRegConfig | None = None
) -> BuiltinScorer:
    """Fit TF-IDF on the corpus, train logistic regression, wrap as a handle."""
    vectorizer = fit_tfidf(train_corpus)
    features = transform_many(
        vectorizer, [doc.tokens for doc in train_corpus.documents]
    )
    model = train_logreg(features, train_corpus.labels(), config)
    return BuiltinScorer(vectorizer, model)


# ---------------------------------------------------------------------------
# External scorer client (newline-delimited JSON over child stdin/stdout)

class _ScorerChild:
    """One child process; a lock serializes request/response pairs."""

    def __init__(self, command: list[str], index: int, ready_timeout: float):
        self.command = command
        self.index = index
        self.lock = threading.Lock()
        try:
            self.proc = subprocess.Popen(
                command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        except OSError as exc:
            raise ScorerError(
                f"failed to spawn scorer child {index} ({command[0]!r}): {exc}"
            ) from exc
        self.adapter_name = ""
        try:
            self.adapter_name = self._handshake(ready_timeout)
        except Exception:
            self.kill()
            raise

    def describe(self) -> str:
        who = self.adapter_name or self.command[0]
        return f"scorer child {self.index} ({who}, pid {self.proc.pid})"

    def _handshake(self, timeout: float) -> str:
        line = self._readline_with_timeout(timeout)
        if line is None:
            raise ScorerError(
                f"scorer child {self.index} ({self.command[0]!r}) did not send "
                f"a ready message within {timeout:g}s"
            )
        if line == "":
            raise ScorerError(
                f"scorer child {self.index} ({self.command[0]!r}) exited before "
                f"becoming ready (exit code {self.proc.poll()})"
            )
        message = self._parse_line(line, context="ready message")
        if message.get("type") != "ready":
            raise ProtocolError(
                f"{self.describe()} sent {message!r} instead of a ready message"
            )
        if message.get("protocol") != PROTOCOL_VERSION:
            raise ProtocolError(
                f"{self.describe()} speaks protocol "
                f"{message.get('protocol')!r}, expected {PROTOCOL_VERSION}"
            )
        return str(message.get("name", ""))

    def _readline_with_timeout(self, timeout: float) -> str | None:
        """Blocking readline in a helper thread; None on timeout."""
        box: list[str] = []

        def _read():
            box.append(self.proc.stdout.readline())

        reader = threading.Thread(target=_read, daemon=True)
        reader.start()
        reader.join(timeout)
        if reader.is_alive():
            return None
        return box[0]

    def _parse_line(self, line: str, context: str) -> dict:
        try:
            message = json.loads(line)
        except json.JSONDecodeError:
            raise ProtocolError(
                f"{self.describe()} emitted a non-JSON line for {context}: "
                f"{line.strip()[:200]!r}"
            ) from None
        if not isinstance(message, dict):
            raise ProtocolError(
                f"{self.describe()} emitted a non-object line for {context}: "
                f"{line.strip()[:200]!r}"
            )
        return message

    def request(self, request_id: int, texts: Sequence[str]) -> list[float]:
        payload = json.dumps(
            {"id": request_id, "texts": list(texts)}, ensure_ascii=False
        )
        with self.lock:
            try:
                self.proc.stdin.write(payload + "\n")
                self.proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                raise ScorerError(
                    f"{self.describe()} exited mid-session while receiving "
                    f"request {request_id}: {exc}"
                ) from exc
            line = self.proc.stdout.readline()
        if line == "":
            raise ScorerError(
                f"{self.describe()} exited mid-session before answering "
                f"request {request_id} (exit code {self.proc.poll()})"
            )
        message = self._parse_line(line, context=f"request {request_id}")
        got_id = message.get("id")
        if got_id != request_id:
            raise ProtocolError(
                f"{self.describe()} answered with id {got_id!r} while request "
                f"{request_id} was pending"
            )
        if "error" in message:
            raise ScorerError(
                f"{self.describe()} reported an error for request "
                f"{request_id}: {message['error']}"
            )
        scores = message.get("scores")
        if not isinstance(scores, list):
            raise ProtocolError(
                f"{self.describe()} sent no scores list for request {request_id}"
            )
        if len(scores) != len(texts):
            raise ProtocolError(
                f"{self.describe()} returned {len(scores)} scores for "
                f"{len(texts)} texts (request {request_id})"
            )
        out = []
        for value in scores:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ProtocolError(
                    f"{self.describe()} returned a non-numeric score "
                    f"{value!r} (request {request_id})"
                )
            score = float(value)
            if not (0.0 <= score <= 1.0):
                raise ProtocolError(
                    f"{self.describe()} returned score {score!r} outside "
                    f"[0, 1] (request {request_id})"
                )
            out.append(score)
        return out

    def close(self, timeout: float = 10.0) -> int | None:
        try:
            if self.proc.stdin and not self.proc.stdin.closed:
                self.proc.stdin.close()
        except OSError:
            pass
        try:
            return self.proc.wait(timeout=timeout)
        except subprocess.TimeoutExpired:
            self.kill()
            return self.proc.poll()

    def kill(self):
        if self.proc.poll() is None:
            self.proc.kill()
            self.proc.wait(timeout=5)


class ExternalScorerPool:
    """Round-robin pool of protocol children behind the scorer contract.

    Requests to a given child are serialized; concurrency comes from the
    pool, so the handle as a whole is safe to share across workers.
    """

    concurrency_safe = True

    def __init__(
        self,
        command: Sequence[str] | str,
        pool_size: int = 1,
        ready_timeout: float = 60.0,
    ):
        if isinstance(command, str):
            command = shlex.split(command)
        command = list(command)
        if not command:
            raise ValueError("scorer command must not be empty")
        if pool_size < 1:
            raise ValueError("pool_size must be a positive integer")
        self._children: list[_ScorerChild] = []
        try:
            for i in range(pool_size):
                self._children.append(_ScorerChild(command, i, ready_timeout))
        except BaseException:
            self.close()
            raise
        self.name = f"external:{self._children[0].adapter_name or command[0]}"
        self._dispatch_lock = threading.Lock()
        self._next_id = 0
        self._next_child = 0
        self.exit_codes: list[int | None] = []

    def score_batch(self, texts: Sequence[str]) -> list[float]:
        with self._dispatch_lock:
            request_id = self._next_id
            self._next_id += 1
            child = self._children[self._next_child]
            self._next_child = (self._next_child + 1) % len(self._children)
        return child.request(request_id, texts)

    def close(self):
        """Close every child's stdin and wait for orderly exits."""
        self.exit_codes = [child.close() for child in self._children]

    def __enter__(self) -> "ExternalScorerPool":
        return self

    def __exit__(self, *exc_info):
        self.close()


def spawn_external_scorer(
    command: Sequence[str] | str,
    pool_size: int = 1,
    ready_timeout: float = 60.0,
) -> ExternalScorerPool:
    """Launch ``pool_size`` protocol children and wrap them as one handle."""
    return ExternalScorerPool(command, pool_size, ready_timeout)
