__version__ = "0.1.0"

from .backends import CACHE_MODEL, CacheLM, SequenceScore, TransformersLM, load_backend
from .config import ORDERS, ScorerConfig
from .errors import (
    InvalidConfigError,
    InvalidCorpusError,
    ScorerError,
    SegmentationError,
    StartupError,
)
from .scorer import (
    MANIFEST_SCHEMA,
    MATRIX_SCHEMA,
    ScoredInstance,
    read_corpus,
    score_corpus,
    score_instance,
    score_pair,
)
from .segment import SEGMENTER_ID, segment

__all__ = [
    "CACHE_MODEL",
    "CacheLM",
    "InvalidConfigError",
    "InvalidCorpusError",
    "MANIFEST_SCHEMA",
    "MATRIX_SCHEMA",
    "ORDERS",
    "ScoredInstance",
    "ScorerConfig",
    "ScorerError",
    "SegmentationError",
    "SEGMENTER_ID",
    "SequenceScore",
    "StartupError",
    "TransformersLM",
    "load_backend",
    "read_corpus",
    "score_corpus",
    "score_instance",
    "score_pair",
    "segment",
    "__version__",
]
