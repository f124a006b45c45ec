"""Redundancy/union extremum searches and the information decomposition.

Redundancy is the largest MI attainable by a collection of source sentences
dominated by every document; union is the smallest MI attainable by a
collection dominating every document. Unique and synergistic information are
derived from those two extrema.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterator, Literal, Optional, Sequence

import numpy as np

from .errors import BudgetExceededError, InvalidInputError, NormalizationUndefinedError
from .matrix import (
    DEFAULT_TOL,
    Collection,
    PmiMatrix,
    expected_mi,
    is_less_informative,
    sentence_profile,
)

Mode = Literal["redundancy", "union"]

# combos processed per numpy batch during exhaustive enumeration
_ENUM_CHUNK = 16384


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the extremum searches.

    ``mode`` selects the search strategy: ``exact`` enumerates all 2^N
    collections (N <= ``exact_limit``), ``beam`` runs the approximate search,
    and ``auto`` picks exact when it fits the budget and beam otherwise.
    """

    mode: Literal["auto", "exact", "beam"] = "auto"
    beam_width: int = 5
    max_collection_size: Optional[int] = None
    exact_limit: int = 20
    tol: float = DEFAULT_TOL
    patience: int = 4

    def __post_init__(self):
        if self.mode not in ("auto", "exact", "beam"):
            raise InvalidInputError(f"unknown search mode {self.mode!r}")
        if self.beam_width < 1:
            raise InvalidInputError("beam_width must be >= 1")
        if not 1 <= self.exact_limit <= 30:
            raise InvalidInputError("exact_limit must be in [1, 30]")
        if self.tol < 0:
            raise InvalidInputError("tol must be non-negative")
        if self.patience < 0:
            raise InvalidInputError("patience must be non-negative")
        if self.max_collection_size is not None and self.max_collection_size < 0:
            raise InvalidInputError("max_collection_size must be non-negative")


@dataclass(frozen=True)
class SearchResult:
    """Outcome of one redundancy or union solve."""

    value: float
    witness: Collection
    feasible: bool
    candidates_evaluated: int
    mode_used: Literal["exact", "beam"]

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": list(self.witness.indices),
            "feasible": self.feasible,
            "candidates_evaluated": self.candidates_evaluated,
            "mode_used": self.mode_used,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SearchResult":
        return cls(
            value=float(data["value"]),
            witness=Collection.of(data["witness"]),
            feasible=bool(data["feasible"]),
            candidates_evaluated=int(data["candidates_evaluated"]),
            mode_used=data["mode_used"],
        )


@dataclass(frozen=True)
class NormalizedPid:
    """Decomposition components divided by the total mutual information."""

    redundancy: float
    union: float
    synergy: float
    unique: tuple[float, ...]
    normalizer: float

    def to_dict(self) -> dict:
        return {
            "redundancy": self.redundancy,
            "union": self.union,
            "synergy": self.synergy,
            "unique": list(self.unique),
            "normalizer": self.normalizer,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizedPid":
        return cls(
            redundancy=float(data["redundancy"]),
            union=float(data["union"]),
            synergy=float(data["synergy"]),
            unique=tuple(float(u) for u in data["unique"]),
            normalizer=float(data["normalizer"]),
        )


@dataclass(frozen=True)
class PidResult:
    """Full decomposition of the source-summary mutual information."""

    per_source_mi: tuple[float, ...]
    total_mi: float
    redundancy: float
    union: float
    unique: tuple[float, ...]
    synergy: float
    redundancy_search: SearchResult
    union_search: SearchResult
    normalized: Optional[NormalizedPid] = None
    normalized_unavailable_reason: Optional[str] = None
    instance_id: str = ""
    label: Optional[str] = None

    @property
    def n_sources(self) -> int:
        return len(self.per_source_mi)

    def to_dict(self) -> dict:
        return {
            "schema": "spider-result/1",
            "instance_id": self.instance_id,
            "label": self.label,
            "n_sources": self.n_sources,
            "per_source_mi": list(self.per_source_mi),
            "total_mi": self.total_mi,
            "redundancy": self.redundancy,
            "union": self.union,
            "unique": list(self.unique),
            "synergy": self.synergy,
            "redundancy_search": self.redundancy_search.to_dict(),
            "union_search": self.union_search.to_dict(),
            "normalized": self.normalized.to_dict() if self.normalized else None,
            "normalized_unavailable_reason": self.normalized_unavailable_reason,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PidResult":
        normalized = data.get("normalized")
        return cls(
            per_source_mi=tuple(float(v) for v in data["per_source_mi"]),
            total_mi=float(data["total_mi"]),
            redundancy=float(data["redundancy"]),
            union=float(data["union"]),
            unique=tuple(float(v) for v in data["unique"]),
            synergy=float(data["synergy"]),
            redundancy_search=SearchResult.from_dict(data["redundancy_search"]),
            union_search=SearchResult.from_dict(data["union_search"]),
            normalized=NormalizedPid.from_dict(normalized) if normalized else None,
            normalized_unavailable_reason=data.get("normalized_unavailable_reason"),
            instance_id=data.get("instance_id", ""),
            label=data.get("label"),
        )


def feasible_for_redundancy(matrix: PmiMatrix, d: Collection, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``d`` is dominated by every document's sentence block."""
    return all(
        is_less_informative(matrix, d, matrix.block_collection(i), tol)
        for i in range(matrix.n_sources)
    )


def feasible_for_union(matrix: PmiMatrix, d: Collection, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``d`` dominates every document's sentence block."""
    return all(
        is_less_informative(matrix, matrix.block_collection(i), d, tol)
        for i in range(matrix.n_sources)
    )


def _fallback(matrix: PmiMatrix, mode: Mode) -> tuple[float, Collection]:
    # Infeasible-search conventions: redundancy bottoms out at no information,
    # union falls back to everything.
    if mode == "redundancy":
        return 0.0, Collection()
    full = matrix.full_collection()
    return expected_mi(matrix, full), full


def _constraint_bounds(matrix: PmiMatrix, mode: Mode) -> tuple[np.ndarray, float]:
    """Componentwise bound a candidate must satisfy against all blocks."""
    profiles = np.stack(
        [sentence_profile(matrix, matrix.block_collection(i)) for i in range(matrix.n_sources)]
    )
    mis = np.array(
        [expected_mi(matrix, matrix.block_collection(i)) for i in range(matrix.n_sources)]
    )
    if mode == "redundancy":
        return profiles.min(axis=0), float(mis.min())
    return profiles.max(axis=0), float(mis.max())


def _batch_stats(matrix: PmiMatrix, combos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """MI and per-sentence profiles for a batch of equal-size collections.

    ``combos`` has shape (batch, k) with k >= 1. Returns (mi[batch],
    profiles[m, batch]) consistent with expected_mi / sentence_profile.
    """
    k = combos.shape[1]
    sub = matrix.pmi[:, combos]  # m x batch x k
    if matrix.weighting == "uniform":
        profiles = sub.mean(axis=2)
        return profiles.mean(axis=0), profiles

    # Likelihood weighting decomposes into per-column sums, so batched
    # evaluation only needs gathers and sums of precomputed column terms.
    log_joint = matrix.log_joint
    shift = log_joint.max()
    joint_w = np.exp(log_joint - shift)
    col_num = (joint_w * matrix.pmi).sum(axis=0)
    col_den = joint_w.sum(axis=0)
    mi = col_num[combos].sum(axis=1) / col_den[combos].sum(axis=1)

    log_pd = matrix.source_log_probs()
    src_w = np.exp(log_pd - log_pd.max())
    prof_num = (matrix.pmi * src_w[None, :])[:, combos].sum(axis=2)
    prof_den = src_w[combos].sum(axis=1)
    profiles = prof_num / prof_den[None, :]
    return mi, profiles


def exact_extremum(matrix: PmiMatrix, mode: Mode, config: SearchConfig) -> SearchResult:
    """Exhaustive search over every subset of source columns.

    Ties are broken toward smaller collections, then lexicographically
    smaller index sets, which the size-major enumeration order delivers for
    free with strict-improvement updates.
    """
    if mode not in ("redundancy", "union"):
        raise InvalidInputError(f"unknown extremum mode {mode!r}")
    n = matrix.n_columns
    if n > config.exact_limit:
        raise BudgetExceededError(n, config.exact_limit)

    bound_profile, bound_mi = _constraint_bounds(matrix, mode)
    tol = config.tol
    sign = 1.0 if mode == "redundancy" else -1.0  # maximize sign * mi

    best_value: Optional[float] = None
    best_witness: Optional[Collection] = None
    evaluated = 0

    max_size = n if config.max_collection_size is None else min(n, config.max_collection_size)

    # Empty collection: zero MI and a zero profile.
    evaluated += 1
    if mode == "redundancy":
        empty_ok = np.all(0.0 <= bound_profile + tol) and 0.0 <= bound_mi + tol
    else:
        empty_ok = np.all(bound_profile <= tol) and bound_mi <= tol
    if empty_ok:
        best_value, best_witness = 0.0, Collection()

    for k in range(1, max_size + 1):
        combo_iter = itertools.combinations(range(n), k)
        while True:
            chunk = list(itertools.islice(combo_iter, _ENUM_CHUNK))
            if not chunk:
                break
            combos = np.array(chunk, dtype=int)
            evaluated += len(chunk)
            mi, profiles = _batch_stats(matrix, combos)
            if mode == "redundancy":
                ok = (profiles <= bound_profile[:, None] + tol).all(axis=0) & (
                    mi <= bound_mi + tol
                )
            else:
                ok = (profiles + tol >= bound_profile[:, None]).all(axis=0) & (
                    mi + tol >= bound_mi
                )
            if not ok.any():
                continue
            scores = np.where(ok, sign * mi, -np.inf)
            pick = int(np.argmax(scores))
            if best_value is None or scores[pick] > sign * best_value:
                best_value = float(mi[pick])
                best_witness = Collection(tuple(int(i) for i in combos[pick]))

    if best_witness is None:
        value, witness = _fallback(matrix, mode)
        return SearchResult(value, witness, False, evaluated, "exact")
    # Recompute through expected_mi so the reported value is bit-identical
    # with per-source and total MI computed elsewhere.
    return SearchResult(expected_mi(matrix, best_witness), best_witness, True, evaluated, "exact")


def _candidate_sort_key(matrix: PmiMatrix, mode: Mode):
    sign = -1.0 if mode == "redundancy" else 1.0

    def key(item: tuple[Collection, float]):
        collection, mi = item
        return (sign * mi, len(collection), collection.indices)

    return key


def _expansions(collection: Collection, n: int, mode: Mode, max_size: Optional[int]) -> Iterator[Collection]:
    """One-column moves: grow (redundancy) or shrink (union), plus swaps.

    Swapping a member column for an unused one keeps the size fixed and lets
    the beam escape greedy dead ends without a full restart.
    """
    if mode == "redundancy":
        if max_size is None or len(collection) < max_size:
            for j in range(n):
                if j not in collection:
                    yield collection.with_column(j)
    else:
        for j in collection.indices:
            yield collection.without_column(j)
    for i in collection.indices:
        base = collection.without_column(i)
        for j in range(n):
            if j not in collection:
                yield base.with_column(j)


def _violation(mi: float, profile: np.ndarray, bound_profile: np.ndarray, bound_mi: float, mode: Mode) -> float:
    """How far a candidate is from satisfying the mode's constraints (0 = feasible)."""
    if mode == "redundancy":
        gap = max(0.0, mi - bound_mi) + float(np.clip(profile - bound_profile, 0.0, None).sum())
    else:
        gap = max(0.0, bound_mi - mi) + float(np.clip(bound_profile - profile, 0.0, None).sum())
    return gap


def beam_extremum(matrix: PmiMatrix, mode: Mode, config: SearchConfig) -> SearchResult:
    """Approximate extremum search.

    Redundancy grows collections from the empty set; union shrinks from the
    full set. Each round expands every frontier member by one add/remove or
    swap move. The frontier keeps two tracks of up to ``beam_width`` members
    each: feasible candidates ranked by the objective, and infeasible
    candidates ranked by constraint violation so the search can cross
    infeasible regions (union in particular usually starts from an
    infeasible full collection).

    The incumbent only ever moves to a feasible collection, so the returned
    value never beats the exhaustive optimum. Patience counts consecutive
    stalled rounds: rounds that produce no feasible candidate at all while
    an incumbent already exists. Rounds are additionally capped at a small
    multiple of the column count since the seen-set makes every round visit
    new collections. Ties break toward smaller, lexicographically earlier
    collections throughout.
    """
    if mode not in ("redundancy", "union"):
        raise InvalidInputError(f"unknown extremum mode {mode!r}")
    n = matrix.n_columns
    tol = config.tol
    sort_key = _candidate_sort_key(matrix, mode)
    bound_profile, bound_mi = _constraint_bounds(matrix, mode)

    def evaluate(collection: Collection) -> tuple[float, float]:
        """(mi, violation); violation 0 means feasible under tol."""
        mi = expected_mi(matrix, collection)
        profile = sentence_profile(matrix, collection)
        if mode == "redundancy":
            feasible = mi <= bound_mi + tol and bool(np.all(profile <= bound_profile + tol))
        else:
            feasible = mi + tol >= bound_mi and bool(np.all(profile + tol >= bound_profile))
        if feasible:
            return mi, 0.0
        return mi, _violation(mi, profile, bound_profile, bound_mi, mode)

    start = Collection() if mode == "redundancy" else matrix.full_collection()
    start_mi, start_violation = evaluate(start)
    evaluated = 1

    incumbent: Optional[tuple[Collection, float]] = None
    if start_violation == 0.0:
        incumbent = (start, start_mi)

    frontier = [start]
    seen = {start.indices}
    stagnant = 0
    round_cap = 4 * n + 8

    for _ in range(round_cap):
        if not frontier:
            break
        feasible_next: list[tuple[Collection, float]] = []
        infeasible_next: list[tuple[float, Collection, float]] = []
        for member in frontier:
            for candidate in _expansions(member, n, mode, config.max_collection_size):
                if candidate.indices in seen:
                    continue
                seen.add(candidate.indices)
                mi, violation = evaluate(candidate)
                evaluated += 1
                if violation == 0.0:
                    feasible_next.append((candidate, mi))
                else:
                    infeasible_next.append((violation, candidate, mi))
        if not feasible_next and not infeasible_next:
            break

        improved = False
        if feasible_next:
            feasible_next.sort(key=sort_key)
            best = feasible_next[0]
            if incumbent is None or sort_key(best) < sort_key(incumbent):
                incumbent = best
                improved = True
        infeasible_next.sort(
            key=lambda item: (item[0],) + sort_key((item[1], item[2]))
        )
        frontier = [c for c, _ in feasible_next[: config.beam_width]]
        frontier += [c for _, c, _ in infeasible_next[: config.beam_width]]

        if improved:
            stagnant = 0
        elif not feasible_next and incumbent is not None:
            stagnant += 1
            if stagnant >= config.patience:
                break

    if incumbent is None:
        value, witness = _fallback(matrix, mode)
        return SearchResult(value, witness, False, evaluated, "beam")
    witness, value = incumbent
    return SearchResult(value, witness, True, evaluated, "beam")


def _run_search(matrix: PmiMatrix, mode: Mode, config: SearchConfig) -> SearchResult:
    if config.mode == "exact":
        return exact_extremum(matrix, mode, config)
    if config.mode == "beam":
        return beam_extremum(matrix, mode, config)
    if matrix.n_columns <= config.exact_limit:
        return exact_extremum(matrix, mode, config)
    return beam_extremum(matrix, mode, config)


def decompose(matrix: PmiMatrix, config: SearchConfig = SearchConfig()) -> PidResult:
    """Split the summary-source mutual information into PID components."""
    per_source = tuple(
        expected_mi(matrix, matrix.block_collection(i)) for i in range(matrix.n_sources)
    )
    total = expected_mi(matrix, matrix.full_collection())

    redundancy_search = _run_search(matrix, "redundancy", config)
    union_search = _run_search(matrix, "union", config)

    unique = tuple(mi - redundancy_search.value for mi in per_source)
    synergy = total - union_search.value

    result = PidResult(
        per_source_mi=per_source,
        total_mi=total,
        redundancy=redundancy_search.value,
        union=union_search.value,
        unique=unique,
        synergy=synergy,
        redundancy_search=redundancy_search,
        union_search=union_search,
        instance_id=matrix.instance_id,
        label=matrix.label,
    )
    if total > 0:
        return replace(result, normalized=normalize(result))
    return replace(
        result,
        normalized_unavailable_reason=f"total mutual information is {total}, not positive",
    )


def normalize(result: PidResult) -> NormalizedPid:
    """Divide every component by the total mutual information."""
    if result.total_mi <= 0:
        raise NormalizationUndefinedError(result.total_mi)
    t = result.total_mi
    return NormalizedPid(
        redundancy=result.redundancy / t,
        union=result.union / t,
        synergy=result.synergy / t,
        unique=tuple(u / t for u in result.unique),
        normalizer=t,
    )
