import numpy as np
import pytest

from spider_pid import PartitionBlock, PmiMatrix, SentenceRecord


def matrix_from_pmi(pmi_rows, block_sizes, weighting="uniform", instance_id="fixture"):
    """Build a matrix whose pmi grid equals ``pmi_rows`` exactly.

    All marginal log-probs are -1, so log_joint = pmi - 2.
    """
    pmi = np.asarray(pmi_rows, dtype=float)
    m, n_cols = pmi.shape
    assert sum(block_sizes) == n_cols
    summary = [SentenceRecord(f"s{i}", -1.0) for i in range(m)]
    sources = [SentenceRecord(f"d{j}", -1.0) for j in range(n_cols)]
    partition = []
    cursor = 0
    for i, size in enumerate(block_sizes):
        partition.append(PartitionBlock(f"doc{i}", cursor, cursor + size))
        cursor += size
    return PmiMatrix(
        summary=summary,
        sources=sources,
        partition=partition,
        log_joint=pmi - 2.0,
        weighting=weighting,
        instance_id=instance_id,
    )


def random_matrix(rng, max_m=4, max_n=4, max_cols=12, weighting="uniform",
                  pmi_loc=0.2, pmi_scale=0.5):
    """Random matrix with n blocks whose sizes sum to at most max_cols."""
    m = int(rng.integers(1, max_m + 1))
    n = int(rng.integers(1, max_n + 1))
    sizes = []
    remaining = max_cols - n  # leave room for 1 column per block
    for i in range(n):
        extra = int(rng.integers(0, remaining + 1))
        sizes.append(1 + extra)
        remaining -= extra
    n_cols = sum(sizes)

    log_ps = rng.uniform(-4.0, -1.0, size=m)
    log_pd = rng.uniform(-4.0, -1.0, size=n_cols)
    pmi = rng.normal(pmi_loc, pmi_scale, size=(m, n_cols))
    log_joint = pmi + log_ps[:, None] + log_pd[None, :]

    summary = [SentenceRecord(f"s{i}", float(lp)) for i, lp in enumerate(log_ps)]
    sources = [SentenceRecord(f"d{j}", float(lp)) for j, lp in enumerate(log_pd)]
    partition = []
    cursor = 0
    for i, size in enumerate(sizes):
        partition.append(PartitionBlock(f"doc{i}", cursor, cursor + size))
        cursor += size
    return PmiMatrix(
        summary=summary,
        sources=sources,
        partition=partition,
        log_joint=log_joint,
        weighting=weighting,
        instance_id=f"rand-{rng.integers(0, 10**9)}",
    )


@pytest.fixture
def f1_matrix():
    """One summary sentence, two single-sentence sources, pmi [0.6, 0.2]."""
    return matrix_from_pmi([[0.6, 0.2]], [1, 1], instance_id="f1")


@pytest.fixture
def f2_matrix():
    """Duplicated sources: pmi [0.5, 0.5] across two blocks."""
    return matrix_from_pmi([[0.5, 0.5]], [1, 1], instance_id="f2")
