"""Aggregation of decomposition results across a corpus.

Mirrors the measurement pipeline: per-group component statistics,
unique-information variance by source count, top-unique-source frequencies,
and label-grouped synergy comparison with unrelated-instance generation.
All variances and standard deviations are population (ddof=0) statistics.
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .decomposition import NormalizedPid
from .errors import CannotGenerateError, EmptyReportError, InvalidInputError
from .estimation import Instance

COMPONENTS = ("union", "synergy", "redundancy", "unique_summary")

GROUP_BYS = ("dataset", "n_sources", "label")


@dataclass(frozen=True)
class ResultRecord:
    """One decomposed instance, normalized scores required."""

    instance_id: str
    n_sources: int
    normalized: NormalizedPid
    label: Optional[str] = None

    def __post_init__(self):
        if self.normalized is None:
            raise InvalidInputError(
                f"record {self.instance_id!r} has no normalized scores; "
                "raw-only results cannot be aggregated"
            )
        if self.n_sources != len(self.normalized.unique):
            raise InvalidInputError(
                f"record {self.instance_id!r}: n_sources={self.n_sources} but the "
                f"unique vector has length {len(self.normalized.unique)}"
            )

    @property
    def unique_summary(self) -> float:
        return float(np.mean(self.normalized.unique))

    def component(self, name: str) -> float:
        if name == "unique_summary":
            return self.unique_summary
        return getattr(self.normalized, name)

    @classmethod
    def from_result_dict(cls, data: dict) -> "ResultRecord":
        normalized = data.get("normalized")
        if not normalized:
            raise InvalidInputError(
                f"record {data.get('instance_id')!r} has no normalized scores"
            )
        return cls(
            instance_id=str(data.get("instance_id", "")),
            n_sources=int(data["n_sources"]),
            normalized=NormalizedPid.from_dict(normalized),
            label=data.get("label"),
        )


def format_mean_std(mean: float, std: float) -> str:
    """Render a component statistic as e.g. ``0.48 (±0.2)``."""
    return f"{mean:.2f} (±{std:.1f})"


@dataclass(frozen=True)
class AggregateReport:
    group_key: str
    count: int
    mean: dict[str, float]
    std: dict[str, float]

    def formatted(self) -> dict[str, str]:
        return {c: format_mean_std(self.mean[c], self.std[c]) for c in COMPONENTS}

    def to_dict(self) -> dict:
        return {
            "group_key": self.group_key,
            "count": self.count,
            "mean": dict(self.mean),
            "std": dict(self.std),
            "formatted": self.formatted(),
        }


def dataset_of(instance_id: str) -> str:
    """Dataset name convention: the instance_id segment before the first '/'."""
    return instance_id.split("/", 1)[0]


def paragraph_of(instance_id: str) -> str:
    """Paragraph provenance convention: the segment before the first ':'."""
    return instance_id.split(":", 1)[0]


def _group_key(record: ResultRecord, group_by: str) -> str:
    if group_by == "dataset":
        return dataset_of(record.instance_id)
    if group_by == "n_sources":
        return str(record.n_sources)
    if group_by == "label":
        if record.label is None:
            raise InvalidInputError(
                f"record {record.instance_id!r} has no label; cannot group by label"
            )
        return record.label
    raise InvalidInputError(f"unknown group_by {group_by!r}; expected one of {GROUP_BYS}")


def aggregate(records: Sequence[ResultRecord], group_by: str) -> list[AggregateReport]:
    """Per-group mean and population std of every component."""
    if not records:
        raise EmptyReportError("no records to aggregate")
    groups: dict[str, list[ResultRecord]] = {}
    for record in records:
        groups.setdefault(_group_key(record, group_by), []).append(record)
    reports = []
    for key in sorted(groups):
        members = groups[key]
        mean = {}
        std = {}
        for component in COMPONENTS:
            values = np.array([r.component(component) for r in members])
            mean[component] = float(values.mean())
            std[component] = float(values.std())
        reports.append(AggregateReport(group_key=key, count=len(members), mean=mean, std=std))
    return reports


@dataclass(frozen=True)
class UniqueVarianceTable:
    """Mean per-record variance of normalized unique shares, in percent."""

    by_n_sources: dict[int, float]
    skipped: int

    def to_dict(self) -> dict:
        return {
            "by_n_sources": {str(k): v for k, v in sorted(self.by_n_sources.items())},
            "skipped": self.skipped,
        }


def unique_variance(records: Sequence[ResultRecord]) -> UniqueVarianceTable:
    """Population variance of each record's unique vector, averaged per group."""
    if not records:
        raise EmptyReportError("no records for the variance table")
    variances: dict[int, list[float]] = {}
    skipped = 0
    for record in records:
        if record.n_sources < 2:
            skipped += 1
            continue
        variances.setdefault(record.n_sources, []).append(
            float(np.var(record.normalized.unique))
        )
    table = {n: float(np.mean(vs)) * 100.0 for n, vs in variances.items()}
    return UniqueVarianceTable(by_n_sources=table, skipped=skipped)


def top_unique_histogram(records: Sequence[ResultRecord]) -> dict[int, list[float]]:
    """Relative frequency of each source position holding the most unique info.

    Ties go to the lowest position. Keyed by source count; each frequency
    vector sums to 1.
    """
    if not records:
        raise EmptyReportError("no records for the histogram")
    counts: dict[int, np.ndarray] = {}
    for record in records:
        top = int(np.argmax(record.normalized.unique))
        bucket = counts.setdefault(record.n_sources, np.zeros(record.n_sources))
        bucket[top] += 1
    return {n: list(c / c.sum()) for n, c in sorted(counts.items())}


def make_unrelated(corpus: Sequence[Instance], seed: int) -> list[Instance]:
    """Pair each instance's sources with a summary from a different paragraph.

    Paragraph provenance is read from the instance_id (see
    :func:`paragraph_of`). Deterministic for a fixed seed.
    """
    paragraphs = {paragraph_of(inst.instance_id) for inst in corpus}
    if len(corpus) < 2 or len(paragraphs) < 2:
        raise CannotGenerateError(
            f"need at least 2 instances from 2 distinct paragraphs, got "
            f"{len(corpus)} instances in {len(paragraphs)} paragraph(s)"
        )
    rng = random.Random(seed)
    out = []
    for inst in corpus:
        own = paragraph_of(inst.instance_id)
        donors = [other for other in corpus if paragraph_of(other.instance_id) != own]
        donor = rng.choice(donors)
        out.append(
            Instance(
                instance_id=f"{inst.instance_id}#unrelated",
                summary_sentences=donor.summary_sentences,
                documents=inst.documents,
                label="unrelated",
            )
        )
    return out


@dataclass(frozen=True)
class LabelComparison:
    reports: list[AggregateReport]
    # True/False when correct, incorrect and unrelated are all present;
    # None when the strict-ordering check is not applicable.
    synergy_ordering: Optional[bool]

    def to_dict(self) -> dict:
        return {
            "reports": [r.to_dict() for r in self.reports],
            "synergy_ordering_correct_gt_incorrect_gt_unrelated": self.synergy_ordering,
        }


def label_comparison(records: Sequence[ResultRecord]) -> LabelComparison:
    """Aggregate by label and check the synergy ordering across answer types."""
    reports = aggregate(records, "label")
    mean_synergy = {r.group_key: r.mean["synergy"] for r in reports}
    ordering = None
    if {"correct", "incorrect", "unrelated"} <= set(mean_synergy):
        ordering = (
            mean_synergy["correct"] > mean_synergy["incorrect"] > mean_synergy["unrelated"]
        )
    return LabelComparison(reports=reports, synergy_ordering=ordering)


def reservoir_sample(items: Iterable, k: int, seed: int) -> list:
    """Uniform sample of up to ``k`` items in one pass (algorithm R), seeded."""
    if k < 0:
        raise InvalidInputError("sample size must be non-negative")
    rng = random.Random(seed)
    sample: list = []
    for i, item in enumerate(items):
        if i < k:
            sample.append(item)
        else:
            j = rng.randint(0, i)
            if j < k:
                sample[j] = item
    return sample


def build_report(
    records: Sequence[ResultRecord],
    group_by: str,
    skipped_raw_only: int = 0,
) -> dict:
    """Assemble the full analysis report as a JSON-serializable dict."""
    groups = aggregate(records, group_by)
    report = {
        "schema": "spider-report/1",
        "group_by": group_by,
        "n_records": len(records),
        "skipped_raw_only": skipped_raw_only,
        "groups": [g.to_dict() for g in groups],
        "unique_variance": unique_variance(records).to_dict(),
        "top_unique_histogram": {
            str(n): freqs for n, freqs in top_unique_histogram(records).items()
        },
    }
    if group_by == "label":
        report["label_comparison"] = label_comparison(records).to_dict()
    return report


def write_report_csv(report: dict, path: str | Path) -> None:
    """One row per group; statistics identical to the JSON report."""
    columns = ["group_key", "count"]
    for component in COMPONENTS:
        columns += [f"{component}_mean", f"{component}_std", f"{component}_formatted"]
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for group in report["groups"]:
            row = [group["group_key"], group["count"]]
            for component in COMPONENTS:
                row += [
                    repr(group["mean"][component]),
                    repr(group["std"][component]),
                    group["formatted"][component],
                ]
            writer.writerow(row)
