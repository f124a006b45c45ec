"""Instance corpus model, the built-in unigram estimator, and matrix files.

The matrix file format (``spider-pmi/1``) is shared with external scorers;
anything that writes it can feed the decomposition pipeline. The pmi grid is
never stored: it is re-derived from ``log_joint`` and the marginals on load.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    InvalidInputError,
    InvalidInstanceError,
    MatrixIntegrityError,
    MatrixParseError,
)
from .matrix import PartitionBlock, PmiMatrix, SentenceRecord, WEIGHTINGS

MATRIX_SCHEMA = "spider-pmi/1"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

_UNSEEN = "\x00unseen"


@dataclass(frozen=True)
class InstanceDocument:
    doc_id: str
    sentences: tuple[str, ...]

    def __post_init__(self):
        if not self.sentences:
            raise InvalidInputError(f"document {self.doc_id!r} has no sentences")
        if any(not s for s in self.sentences):
            raise InvalidInputError(f"document {self.doc_id!r} contains an empty sentence")
        object.__setattr__(self, "sentences", tuple(self.sentences))


@dataclass(frozen=True)
class Instance:
    """One summary plus its source documents, optionally labeled."""

    instance_id: str
    summary_sentences: tuple[str, ...]
    documents: tuple[InstanceDocument, ...]
    label: Optional[str] = None

    def __post_init__(self):
        if not self.summary_sentences or any(not s for s in self.summary_sentences):
            raise InvalidInputError(
                f"instance {self.instance_id!r} needs at least one non-empty summary sentence"
            )
        if not self.documents:
            raise InvalidInputError(f"instance {self.instance_id!r} has no documents")
        object.__setattr__(self, "summary_sentences", tuple(self.summary_sentences))
        object.__setattr__(self, "documents", tuple(self.documents))

    def to_dict(self) -> dict:
        data = {
            "instance_id": self.instance_id,
            "summary_sentences": list(self.summary_sentences),
            "documents": [
                {"doc_id": d.doc_id, "sentences": list(d.sentences)} for d in self.documents
            ],
        }
        if self.label is not None:
            data["label"] = self.label
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        return cls(
            instance_id=str(data["instance_id"]),
            summary_sentences=tuple(data["summary_sentences"]),
            documents=tuple(
                InstanceDocument(d["doc_id"], tuple(d["sentences"])) for d in data["documents"]
            ),
            label=data.get("label"),
        )


def tokenize(text: str) -> list[str]:
    """Lowercased whitespace-and-punctuation token split."""
    return _TOKEN_RE.findall(text.lower())


def read_corpus(path: str | Path) -> list[Instance]:
    """Read a JSON Lines corpus, reporting the offending line on failure."""
    instances = []
    seen_ids = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                instance = Instance.from_dict(json.loads(line))
            except (json.JSONDecodeError, KeyError, TypeError, InvalidInputError) as exc:
                raise InvalidInputError(f"{path}:{line_no}: bad instance record: {exc}") from exc
            if instance.instance_id in seen_ids:
                raise InvalidInputError(
                    f"{path}:{line_no}: duplicate instance_id {instance.instance_id!r}"
                )
            seen_ids.add(instance.instance_id)
            instances.append(instance)
    return instances


def write_corpus(instances: Iterable[Instance], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for instance in instances:
            handle.write(json.dumps(instance.to_dict(), ensure_ascii=False, sort_keys=True))
            handle.write("\n")


def unigram_estimate(
    instance: Instance,
    smoothing_alpha: float = 1.0,
    gamma: float = 0.1,
    weighting: str = "uniform",
) -> PmiMatrix:
    """Score an instance with a deterministic add-alpha unigram model.

    Marginal log-probabilities are sums of token log-probabilities under one
    unigram distribution fit on the whole instance (plus an unseen-token
    bucket). Under a pure unigram model the joint of a concatenated pair
    factorizes, so the joint additionally credits ``gamma`` per token type
    shared between the pair; shared vocabulary is the only source of
    positive pmi. This estimator is a self-contained stand-in for a language
    model, not a serious probability model.
    """
    if smoothing_alpha <= 0:
        raise InvalidInputError("smoothing_alpha must be positive")
    if weighting not in WEIGHTINGS:
        raise InvalidInputError(f"unknown weighting {weighting!r}")

    summary_tokens = [tokenize(s) for s in instance.summary_sentences]
    source_sentences: list[str] = []
    partition: list[PartitionBlock] = []
    cursor = 0
    for doc in instance.documents:
        partition.append(PartitionBlock(doc.doc_id, cursor, cursor + len(doc.sentences)))
        source_sentences.extend(doc.sentences)
        cursor += len(doc.sentences)
    source_tokens = [tokenize(s) for s in source_sentences]

    counts: Counter[str] = Counter()
    for toks in summary_tokens + source_tokens:
        counts.update(toks)
    if not counts:
        raise InvalidInstanceError(
            f"instance {instance.instance_id!r} has an empty vocabulary after tokenization"
        )

    total = sum(counts.values())
    denom = math.log(total + smoothing_alpha * (len(counts) + 1))
    log_p = {tok: math.log(c + smoothing_alpha) - denom for tok, c in counts.items()}
    log_p[_UNSEEN] = math.log(smoothing_alpha) - denom

    def sentence_log_prob(tokens: list[str]) -> float:
        return sum(log_p.get(t, log_p[_UNSEEN]) for t in tokens)

    summary = tuple(
        SentenceRecord(text, sentence_log_prob(toks))
        for text, toks in zip(instance.summary_sentences, summary_tokens)
    )
    sources = tuple(
        SentenceRecord(text, sentence_log_prob(toks))
        for text, toks in zip(source_sentences, source_tokens)
    )

    summary_types = [set(t) for t in summary_tokens]
    source_types = [set(t) for t in source_tokens]
    log_joint = np.empty((len(summary), len(sources)))
    for i, s_rec in enumerate(summary):
        for j, d_rec in enumerate(sources):
            shared = len(summary_types[i] & source_types[j])
            log_joint[i, j] = s_rec.log_prob + d_rec.log_prob + gamma * shared

    return PmiMatrix(
        summary=summary,
        sources=sources,
        partition=tuple(partition),
        log_joint=log_joint,
        weighting=weighting,
        instance_id=instance.instance_id,
        label=instance.label,
    )


def matrix_to_dict(matrix: PmiMatrix) -> dict:
    data = {
        "schema": MATRIX_SCHEMA,
        "instance_id": matrix.instance_id,
        "summary": [{"text": r.text, "log_prob": r.log_prob} for r in matrix.summary],
        "sources": [{"text": r.text, "log_prob": r.log_prob} for r in matrix.sources],
        "partition": [
            {"doc_id": b.doc_id, "start": b.start, "end": b.end} for b in matrix.partition
        ],
        "log_joint": [[float(v) for v in row] for row in matrix.log_joint],
        "weighting": matrix.weighting,
    }
    if matrix.label is not None:
        data["label"] = matrix.label
    return data


def save_matrix(matrix: PmiMatrix, path: str | Path) -> None:
    """Write a spider-pmi/1 file. Floats survive the round trip losslessly."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(matrix_to_dict(matrix), handle, ensure_ascii=False, sort_keys=True, indent=1)
        handle.write("\n")


def _require(data: dict, key: str, kind, location: str):
    if key not in data:
        raise MatrixParseError(f"{location}/{key}", "missing required field")
    value = data[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MatrixParseError(f"{location}/{key}", f"expected a number, got {value!r}")
        return float(value)
    if not isinstance(value, kind):
        raise MatrixParseError(
            f"{location}/{key}", f"expected {kind.__name__}, got {type(value).__name__}"
        )
    return value


def _parse_records(items, location: str) -> list[SentenceRecord]:
    if not isinstance(items, list) or not items:
        raise MatrixParseError(location, "expected a non-empty array of sentence records")
    records = []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise MatrixParseError(f"{location}/{i}", "expected an object")
        text = _require(item, "text", str, f"{location}/{i}")
        log_prob = _require(item, "log_prob", float, f"{location}/{i}")
        if not math.isfinite(log_prob):
            raise MatrixParseError(f"{location}/{i}/log_prob", "must be finite")
        records.append(SentenceRecord(text, log_prob))
    return records


def matrix_from_dict(data: dict, integrity_tol: float = 1e-9) -> PmiMatrix:
    if not isinstance(data, dict):
        raise MatrixParseError("", "expected a JSON object")
    schema = _require(data, "schema", str, "")
    if schema != MATRIX_SCHEMA:
        raise MatrixParseError("/schema", f"expected {MATRIX_SCHEMA!r}, got {schema!r}")
    instance_id = _require(data, "instance_id", str, "")
    summary = _parse_records(data.get("summary"), "/summary")
    sources = _parse_records(data.get("sources"), "/sources")

    raw_partition = _require(data, "partition", list, "")
    partition = []
    for i, item in enumerate(raw_partition):
        if not isinstance(item, dict):
            raise MatrixParseError(f"/partition/{i}", "expected an object")
        doc_id = _require(item, "doc_id", str, f"/partition/{i}")
        start = _require(item, "start", int, f"/partition/{i}")
        end = _require(item, "end", int, f"/partition/{i}")
        try:
            partition.append(PartitionBlock(doc_id, start, end))
        except InvalidInputError as exc:
            raise MatrixParseError(f"/partition/{i}", str(exc)) from exc

    raw_joint = _require(data, "log_joint", list, "")
    if len(raw_joint) != len(summary):
        raise MatrixParseError("/log_joint", f"expected {len(summary)} rows, got {len(raw_joint)}")
    for i, row in enumerate(raw_joint):
        if not isinstance(row, list) or len(row) != len(sources):
            raise MatrixParseError(f"/log_joint/{i}", f"expected a row of {len(sources)} numbers")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise MatrixParseError(f"/log_joint/{i}/{j}", f"expected a finite number, got {v!r}")
    log_joint = np.array(raw_joint, dtype=float)

    weighting = _require(data, "weighting", str, "")
    if weighting not in WEIGHTINGS:
        raise MatrixParseError("/weighting", f"expected one of {WEIGHTINGS}, got {weighting!r}")

    label = data.get("label")
    if label is not None and not isinstance(label, str):
        raise MatrixParseError("/label", f"expected a string, got {type(label).__name__}")

    try:
        matrix = PmiMatrix(
            summary=summary,
            sources=sources,
            partition=partition,
            log_joint=log_joint,
            weighting=weighting,
            instance_id=instance_id,
            label=label,
        )
    except InvalidInputError as exc:
        raise MatrixParseError("", str(exc)) from exc

    # Files may carry a redundant pmi grid; if they do, it must agree with
    # the grid recomputed from log_joint and the marginals.
    if "pmi" in data:
        stored = np.asarray(data["pmi"], dtype=float)
        if stored.shape != matrix.pmi.shape:
            raise MatrixIntegrityError(
                f"stored pmi grid has shape {stored.shape}, expected {matrix.pmi.shape}"
            )
        drift = np.abs(stored - matrix.pmi)
        if drift.max() > integrity_tol:
            i, j = np.unravel_index(int(np.argmax(drift)), drift.shape)
            raise MatrixIntegrityError(
                f"stored pmi[{i}][{j}]={stored[i, j]} disagrees with the value recomputed "
                f"from log_joint and the marginals ({matrix.pmi[i, j]}) beyond {integrity_tol}"
            )
    return matrix


def load_matrix(path: str | Path) -> PmiMatrix:
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise MatrixParseError("", f"not valid JSON: {exc}") from exc
    return matrix_from_dict(data)
