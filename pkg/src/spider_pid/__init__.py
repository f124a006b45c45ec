"""Partial information decomposition for multi-document summarization.

Decomposes the mutual information a set of source documents provides about
a summary into union, redundancy, per-source unique, and synergistic
components, working from a matrix of pairwise pointwise mutual information
between summary and source sentences.
"""

__version__ = "0.1.0"

from .analysis import (
    AggregateReport,
    LabelComparison,
    ResultRecord,
    UniqueVarianceTable,
    aggregate,
    build_report,
    format_mean_std,
    label_comparison,
    make_unrelated,
    reservoir_sample,
    top_unique_histogram,
    unique_variance,
)
from .decomposition import (
    NormalizedPid,
    PidResult,
    SearchConfig,
    SearchResult,
    beam_extremum,
    decompose,
    exact_extremum,
    feasible_for_redundancy,
    feasible_for_union,
    normalize,
)
from .errors import (
    BudgetExceededError,
    CannotGenerateError,
    EmptyReportError,
    InvalidInputError,
    InvalidInstanceError,
    MatrixIntegrityError,
    MatrixParseError,
    NormalizationUndefinedError,
    SpiderError,
)
from .estimation import (
    Instance,
    InstanceDocument,
    load_matrix,
    read_corpus,
    save_matrix,
    tokenize,
    unigram_estimate,
    write_corpus,
)
from .estimators import InformationDecomposer, UnigramPmiScorer
from .matrix import (
    Collection,
    PartitionBlock,
    PmiMatrix,
    SentenceRecord,
    expected_mi,
    is_less_informative,
    pmi_value,
    sentence_profile,
)

__all__ = [
    "AggregateReport",
    "BudgetExceededError",
    "CannotGenerateError",
    "Collection",
    "EmptyReportError",
    "InformationDecomposer",
    "Instance",
    "InstanceDocument",
    "InvalidInputError",
    "InvalidInstanceError",
    "LabelComparison",
    "MatrixIntegrityError",
    "MatrixParseError",
    "NormalizationUndefinedError",
    "NormalizedPid",
    "PartitionBlock",
    "PidResult",
    "PmiMatrix",
    "ResultRecord",
    "SearchConfig",
    "SearchResult",
    "SentenceRecord",
    "SpiderError",
    "UnigramPmiScorer",
    "UniqueVarianceTable",
    "aggregate",
    "beam_extremum",
    "build_report",
    "decompose",
    "exact_extremum",
    "expected_mi",
    "feasible_for_redundancy",
    "feasible_for_union",
    "format_mean_std",
    "is_less_informative",
    "label_comparison",
    "load_matrix",
    "make_unrelated",
    "normalize",
    "pmi_value",
    "read_corpus",
    "reservoir_sample",
    "save_matrix",
    "sentence_profile",
    "tokenize",
    "top_unique_histogram",
    "unigram_estimate",
    "unique_variance",
    "write_corpus",
]
