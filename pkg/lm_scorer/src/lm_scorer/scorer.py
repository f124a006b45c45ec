"""Score instance corpora into spider-pmi/1 matrix files.

The corpus is the same JSON Lines format the decomposition pipeline reads:
one object per line with instance_id, summary_sentences, documents and an
optional label. Records may carry raw ``summary_text`` or per-document
``text`` instead of sentence lists; those are segmented here. Output files
are written atomically (temp then rename) so a consumer can read a
directory while it is being filled.
"""

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .backends import SequenceScore, load_backend
from .config import ScorerConfig
from .errors import InvalidCorpusError
from .segment import SEGMENTER_ID, segment

MATRIX_SCHEMA = "spider-pmi/1"
MANIFEST_SCHEMA = "spider-lm-manifest/1"
TOOL = "spider-lm-scorer"


@dataclass(frozen=True)
class ScoredInstance:
    instance_id: str
    summary_sentences: tuple[str, ...]
    doc_ids: tuple[str, ...]
    doc_sentences: tuple[tuple[str, ...], ...]
    label: Optional[str]


def _sentences(data: dict, list_key: str, text_key: str, where: str) -> tuple[str, ...]:
    if list_key in data:
        sentences = tuple(str(s) for s in data[list_key])
    elif text_key in data:
        sentences = tuple(segment(str(data[text_key])))
    else:
        raise InvalidCorpusError(f"{where}: needs {list_key!r} or {text_key!r}")
    if not sentences or any(not s for s in sentences):
        raise InvalidCorpusError(f"{where}: empty sentence list")
    return sentences


def read_corpus(path: str | Path) -> list[ScoredInstance]:
    instances = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            where = f"{path}:{line_no}"
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InvalidCorpusError(f"{where}: not valid JSON: {exc}") from exc
            try:
                docs = data["documents"]
                instances.append(
                    ScoredInstance(
                        instance_id=str(data["instance_id"]),
                        summary_sentences=_sentences(
                            data, "summary_sentences", "summary_text", where
                        ),
                        doc_ids=tuple(str(d["doc_id"]) for d in docs),
                        doc_sentences=tuple(
                            _sentences(d, "sentences", "text", where) for d in docs
                        ),
                        label=data.get("label"),
                    )
                )
            except (KeyError, TypeError) as exc:
                raise InvalidCorpusError(f"{where}: bad instance record: {exc}") from exc
    if not instances:
        raise InvalidCorpusError(f"{path}: corpus is empty")
    return instances


def _all_texts(instances: Sequence[ScoredInstance]) -> list[str]:
    texts = []
    for inst in instances:
        texts.extend(inst.summary_sentences)
        for sentences in inst.doc_sentences:
            texts.extend(sentences)
    return texts


def joint_log_prob(
    backend, s: str, d: str, config: ScorerConfig
) -> tuple[float, bool]:
    """Log-likelihood of the concatenated pair under the configured order."""
    sep = config.separator
    if config.order == "s_then_d":
        scores = backend.score([s + sep + d])
        return scores[0].log_prob, scores[0].truncated
    if config.order == "d_then_s":
        scores = backend.score([d + sep + s])
        return scores[0].log_prob, scores[0].truncated
    forward, backward = backend.score([s + sep + d, d + sep + s])
    value = (forward.log_prob + backward.log_prob) / 2.0
    return value, forward.truncated or backward.truncated


def score_pair(backend, s: str, d: str, config: ScorerConfig) -> float:
    """pmi(s; d) = log p(concatenation) - log p(s) - log p(d)."""
    log_ps, log_pd = (r.log_prob for r in backend.score([s, d]))
    log_joint, _ = joint_log_prob(backend, s, d, config)
    return log_joint - log_ps - log_pd


def score_instance(instance: ScoredInstance, backend, config: ScorerConfig) -> tuple[dict, int]:
    """Build one spider-pmi/1 payload; returns (payload, truncated pair count)."""
    sources = [s for sentences in instance.doc_sentences for s in sentences]
    marginals = backend.score(list(instance.summary_sentences) + sources)
    summary_scores = marginals[: len(instance.summary_sentences)]
    source_scores = marginals[len(instance.summary_sentences) :]

    truncated_pairs = 0
    log_joint = []
    for s in instance.summary_sentences:
        row = []
        for d in sources:
            value, truncated = joint_log_prob(backend, s, d, config)
            truncated_pairs += truncated
            row.append(value)
        log_joint.append(row)

    partition = []
    cursor = 0
    for doc_id, sentences in zip(instance.doc_ids, instance.doc_sentences):
        partition.append({"doc_id": doc_id, "start": cursor, "end": cursor + len(sentences)})
        cursor += len(sentences)

    payload = {
        "schema": MATRIX_SCHEMA,
        "instance_id": instance.instance_id,
        "summary": [
            {"text": s, "log_prob": score.log_prob}
            for s, score in zip(instance.summary_sentences, summary_scores)
        ],
        "sources": [
            {"text": d, "log_prob": score.log_prob}
            for d, score in zip(sources, source_scores)
        ],
        "partition": partition,
        "log_joint": log_joint,
        "weighting": "uniform",
    }
    if instance.label is not None:
        payload["label"] = instance.label
    return payload, truncated_pairs


def _atomic_write(path: Path, content: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(content, encoding="utf-8")
    os.replace(tmp, path)


def _safe_name(instance_id: str) -> str:
    import re

    return re.sub(r"[^A-Za-z0-9._-]+", "_", instance_id) or "instance"


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def score_corpus(
    corpus_path: str | Path, out_dir: str | Path, config: ScorerConfig
) -> list[Path]:
    """Score every instance and write one matrix file each, plus a manifest."""
    corpus_path = Path(corpus_path)
    out_dir = Path(out_dir)
    instances = read_corpus(corpus_path)
    backend = load_backend(config, _all_texts(instances))
    out_dir.mkdir(parents=True, exist_ok=True)

    written = []
    truncated_pairs = 0
    for idx, instance in enumerate(instances):
        payload, truncated = score_instance(instance, backend, config)
        truncated_pairs += truncated
        path = out_dir / f"{idx:05d}__{_safe_name(instance.instance_id)}.pmi.json"
        _atomic_write(
            path, json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1) + "\n"
        )
        written.append(path)

    manifest = {
        "schema": MANIFEST_SCHEMA,
        "tool": TOOL,
        "version": __version__,
        "command": "score",
        "params": {
            "model": config.model,
            "device": config.device,
            "batch_size": config.batch_size,
            "max_seq_len": config.max_seq_len,
            "order": config.order,
            "separator": config.separator,
            "segmenter": SEGMENTER_ID,
        },
        "inputs": [{"name": corpus_path.name, "sha256": _sha256(corpus_path)}],
        "truncated_pairs": truncated_pairs,
    }
    _atomic_write(
        out_dir / "manifest.json",
        json.dumps(manifest, ensure_ascii=False, sort_keys=True) + "\n",
    )
    return written
