"""stopgen: task-specific stopword lists from deletion-based AUC degradation.

Pipeline: load a labeled corpus, rank every vocabulary token by how much a
probabilistic classifier's ROC-AUC changes when the token is deleted
(iterative single-pass or recursive greedy variants), cut stopword lists
from the ranking, then validate them by retraining a TF-IDF
logistic-regression model on the reduced corpus.
"""

from ._version import __version__
from .corpus import (
    Corpus,
    Document,
    Vocabulary,
    build_vocabulary,
    delete_token,
    delete_tokens,
    load_corpus,
    tokenize,
)
from .deletion import (
    ImportanceRanking,
    RecursiveTrace,
    iterative_deletion,
    recursive_deletion,
)
from .errors import (
    CheckpointError,
    CorpusFormatError,
    DataError,
    ProtocolError,
    ScorerError,
    StopgenError,
    UsageError,
)
from .evaluation import (
    EvalReport,
    ReductionReport,
    emit_reports,
    evaluate_stopword_set,
    reduction,
)
from .metrics import accuracy, f1, roc_auc
from .scorer import (
    BuiltinScorer,
    ExternalScorerPool,
    LogRegConfig,
    LogRegModel,
    TfidfVectorizer,
    builtin_scorer,
    fit_tfidf,
    predict_proba,
    spawn_external_scorer,
    train_logreg,
    transform,
)
from .stopwords import (
    StopwordList,
    baseline_list,
    from_ranking,
    load_list,
    merge,
    save_list,
)

__all__ = [
    "__version__",
    "Corpus",
    "Document",
    "Vocabulary",
    "build_vocabulary",
    "delete_token",
    "delete_tokens",
    "load_corpus",
    "tokenize",
    "ImportanceRanking",
    "RecursiveTrace",
    "iterative_deletion",
    "recursive_deletion",
    "CheckpointError",
    "CorpusFormatError",
    "DataError",
    "ProtocolError",
    "ScorerError",
    "StopgenError",
    "UsageError",
    "EvalReport",
    "ReductionReport",
    "emit_reports",
    "evaluate_stopword_set",
    "reduction",
    "accuracy",
    "f1",
    "roc_auc",
    "BuiltinScorer",
    "ExternalScorerPool",
    "LogRegConfig",
    "LogRegModel",
    "TfidfVectorizer",
    "builtin_scorer",
    "fit_tfidf",
    "predict_proba",
    "spawn_external_scorer",
    "train_logreg",
    "transform",
    "StopwordList",
    "baseline_list",
    "from_ranking",
    "load_list",
    "merge",
    "save_list",
]
