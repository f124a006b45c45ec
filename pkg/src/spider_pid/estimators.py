"""scikit-learn style wrappers around the scorer and the decomposer.

These make the pipeline compose with sklearn tooling (``Pipeline``,
``get_params``/``set_params``, cloning). Both transformers are stateless:
``fit`` only validates input.
"""

from __future__ import annotations

from typing import Optional, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .decomposition import PidResult, SearchConfig, decompose
from .errors import InvalidInputError
from .estimation import Instance, unigram_estimate
from .matrix import PmiMatrix


def _ensure_all(X, kind, name: str) -> list:
    items = list(X)
    for item in items:
        if not isinstance(item, kind):
            raise InvalidInputError(
                f"{name} expects a sequence of {kind.__name__}, got {type(item).__name__}"
            )
    return items


class UnigramPmiScorer(BaseEstimator, TransformerMixin):
    """Turn instances into PMI matrices with the built-in unigram estimator."""

    def __init__(self, smoothing_alpha: float = 1.0, gamma: float = 0.1, weighting: str = "uniform"):
        self.smoothing_alpha = smoothing_alpha
        self.gamma = gamma
        self.weighting = weighting

    def fit(self, X: Sequence[Instance], y=None):
        _ensure_all(X, Instance, type(self).__name__)
        return self

    def transform(self, X: Sequence[Instance]) -> list[PmiMatrix]:
        instances = _ensure_all(X, Instance, type(self).__name__)
        return [
            unigram_estimate(
                instance,
                smoothing_alpha=self.smoothing_alpha,
                gamma=self.gamma,
                weighting=self.weighting,
            )
            for instance in instances
        ]


class InformationDecomposer(BaseEstimator, TransformerMixin):
    """Run the redundancy/union searches and the PID derivation per matrix."""

    def __init__(
        self,
        mode: str = "auto",
        beam_width: int = 5,
        max_collection_size: Optional[int] = None,
        exact_limit: int = 20,
        tol: float = 1e-9,
        patience: int = 2,
    ):
        self.mode = mode
        self.beam_width = beam_width
        self.max_collection_size = max_collection_size
        self.exact_limit = exact_limit
        self.tol = tol
        self.patience = patience

    def _config(self) -> SearchConfig:
        return SearchConfig(
            mode=self.mode,
            beam_width=self.beam_width,
            max_collection_size=self.max_collection_size,
            exact_limit=self.exact_limit,
            tol=self.tol,
            patience=self.patience,
        )

    def fit(self, X: Sequence[PmiMatrix], y=None):
        _ensure_all(X, PmiMatrix, type(self).__name__)
        self._config()
        return self

    def transform(self, X: Sequence[PmiMatrix]) -> list[PidResult]:
        matrices = _ensure_all(X, PmiMatrix, type(self).__name__)
        config = self._config()
        return [decompose(matrix, config) for matrix in matrices]
