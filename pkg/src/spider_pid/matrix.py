"""PMI matrix data model and mutual-information primitives.

All probabilities are handled in natural-log space end to end; nothing is
exponentiated outside of stabilized softmax computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidInputError

WEIGHTINGS = ("uniform", "likelihood")

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class SentenceRecord:
    """A sentence together with its log marginal probability.

    ``text`` may be empty when only scores are supplied.
    """

    text: str
    log_prob: float

    def __post_init__(self):
        if not math.isfinite(self.log_prob):
            raise InvalidInputError(f"log_prob must be finite, got {self.log_prob}")


@dataclass(frozen=True)
class PartitionBlock:
    """A contiguous, half-open range ``[start, end)`` of source columns."""

    doc_id: str
    start: int
    end: int

    def __post_init__(self):
        if self.end <= self.start:
            raise InvalidInputError(
                f"partition block {self.doc_id!r} is empty: [{self.start}, {self.end})"
            )

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(range(self.start, self.end))


@dataclass(frozen=True)
class Collection:
    """A subset of source-sentence column indices (possibly empty)."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(self.indices)
        if list(idx) != sorted(set(idx)):
            raise InvalidInputError(f"collection indices must be unique and sorted: {idx}")
        if idx and idx[0] < 0:
            raise InvalidInputError(f"collection indices must be non-negative: {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, indices: Iterable[int]) -> "Collection":
        return cls(tuple(sorted(set(int(i) for i in indices))))

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, index: int) -> bool:
        return index in self.indices

    def with_column(self, index: int) -> "Collection":
        return Collection.of(self.indices + (index,))

    def without_column(self, index: int) -> "Collection":
        return Collection(tuple(i for i in self.indices if i != index))


class PmiMatrix:
    """An m x N grid of pointwise mutual information values.

    Rows are summary sentences, columns are source sentences flattened over
    all documents; ``partition`` maps columns back to documents. The pmi grid
    is derived from ``log_joint`` and the marginal log-probabilities, so the
    three are consistent by construction. Instances are immutable.
    """

    def __init__(
        self,
        summary: Sequence[SentenceRecord],
        sources: Sequence[SentenceRecord],
        partition: Sequence[PartitionBlock],
        log_joint: np.ndarray,
        weighting: str = "uniform",
        instance_id: str = "",
        label: str | None = None,
    ):
        if len(summary) < 1:
            raise InvalidInputError("summary must contain at least one sentence")
        if len(sources) < 1:
            raise InvalidInputError("sources must contain at least one sentence")
        if weighting not in WEIGHTINGS:
            raise InvalidInputError(f"unknown weighting {weighting!r}")

        log_joint = np.asarray(log_joint, dtype=float)
        if log_joint.shape != (len(summary), len(sources)):
            raise InvalidInputError(
                f"log_joint shape {log_joint.shape} does not match "
                f"{len(summary)} summary x {len(sources)} source sentences"
            )
        if not np.all(np.isfinite(log_joint)):
            raise InvalidInputError("log_joint contains non-finite entries")

        self._check_partition(partition, len(sources))

        self.summary = tuple(summary)
        self.sources = tuple(sources)
        self.partition = tuple(partition)
        self.log_joint = log_joint
        self.log_joint.setflags(write=False)
        self.weighting = weighting
        self.instance_id = instance_id
        self.label = label

        log_ps = np.array([r.log_prob for r in self.summary])
        log_pd = np.array([r.log_prob for r in self.sources])
        self.pmi = log_joint - log_ps[:, None] - log_pd[None, :]
        self.pmi.setflags(write=False)

    @staticmethod
    def _check_partition(partition: Sequence[PartitionBlock], n_columns: int) -> None:
        if len(partition) < 1:
            raise InvalidInputError("partition must contain at least one block")
        cursor = 0
        for block in partition:
            if block.start != cursor:
                raise InvalidInputError(
                    f"partition blocks must be ordered and contiguous; block "
                    f"{block.doc_id!r} starts at {block.start}, expected {cursor}"
                )
            cursor = block.end
        if cursor != n_columns:
            raise InvalidInputError(
                f"partition covers [0, {cursor}) but there are {n_columns} source columns"
            )

    @property
    def m(self) -> int:
        return len(self.summary)

    @property
    def n_columns(self) -> int:
        return len(self.sources)

    @property
    def n_sources(self) -> int:
        return len(self.partition)

    def block_collection(self, i: int) -> Collection:
        return Collection(self.partition[i].indices)

    def full_collection(self) -> Collection:
        return Collection(tuple(range(self.n_columns)))

    def source_log_probs(self) -> np.ndarray:
        return np.array([r.log_prob for r in self.sources])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PmiMatrix):
            return NotImplemented
        return (
            self.summary == other.summary
            and self.sources == other.sources
            and self.partition == other.partition
            and self.weighting == other.weighting
            and self.instance_id == other.instance_id
            and self.label == other.label
            and np.array_equal(self.log_joint, other.log_joint)
        )


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value}")


def pmi_value(log_ps: float, log_pd: float, log_psd: float) -> float:
    """Pointwise mutual information log p(s;d) - log p(s) - log p(d)."""
    _check_finite("log_ps", log_ps)
    _check_finite("log_pd", log_pd)
    _check_finite("log_psd", log_psd)
    return log_psd - log_ps - log_pd


def _check_collection(matrix: PmiMatrix, collection: Collection) -> None:
    if collection.indices and collection.indices[-1] >= matrix.n_columns:
        raise InvalidInputError(
            f"collection index {collection.indices[-1]} out of range for "
            f"{matrix.n_columns} source columns"
        )


def expected_mi(matrix: PmiMatrix, collection: Collection) -> float:
    """Expectation of pmi over the summary x collection grid.

    Uniform weighting averages all cells; likelihood weighting weights each
    pair proportionally to its joint probability (softmax over log_joint).
    The empty collection carries zero information by convention.
    """
    _check_collection(matrix, collection)
    if not collection.indices:
        return 0.0
    cols = np.array(collection.indices, dtype=int)
    sub = matrix.pmi[:, cols]
    if matrix.weighting == "uniform":
        # mean of row means, matching sentence_profile exactly
        return float(np.mean(sub.mean(axis=1)))
    log_w = matrix.log_joint[:, cols]
    weights = np.exp(log_w - logsumexp(log_w))
    return float(np.sum(weights * sub))


def sentence_profile(matrix: PmiMatrix, collection: Collection) -> np.ndarray:
    """Per-summary-sentence expected pmi over the collection's columns.

    Uniform weighting takes the row mean; likelihood weighting weights
    columns proportionally to the source-sentence marginal probability.
    """
    _check_collection(matrix, collection)
    if not collection.indices:
        return np.zeros(matrix.m)
    cols = np.array(collection.indices, dtype=int)
    sub = matrix.pmi[:, cols]
    if matrix.weighting == "uniform":
        return sub.mean(axis=1)
    log_w = matrix.source_log_probs()[cols]
    weights = np.exp(log_w - logsumexp(log_w))
    return sub @ weights


def is_less_informative(
    matrix: PmiMatrix,
    d: Collection,
    d_prime: Collection,
    tol: float = DEFAULT_TOL,
) -> bool:
    """The ordering relation: d carries no more information than d_prime.

    True iff the aggregate MI and every per-sentence profile entry of ``d``
    are dominated by those of ``d_prime``, each up to an absolute ``tol``.
    """
    if tol < 0:
        raise InvalidInputError(f"tol must be non-negative, got {tol}")
    if expected_mi(matrix, d) > expected_mi(matrix, d_prime) + tol:
        return False
    profile_d = sentence_profile(matrix, d)
    profile_dp = sentence_profile(matrix, d_prime)
    return bool(np.all(profile_d <= profile_dp + tol))
