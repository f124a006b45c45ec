"""Batch pipeline front end: score -> decompose -> analyze.

The pipeline is file mediated: ``score`` writes spider-pmi/1 matrix files,
``decompose`` turns them into a JSON Lines result file, ``analyze`` reduces
results to a report. Every command emits a run manifest next to its output
so identical inputs and flags reproduce identical artifacts byte for byte.

Exit codes: 0 success, 1 partial per-instance failures, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import glob as globlib
import hashlib
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .analysis import GROUP_BYS, ResultRecord, build_report, write_report_csv
from .decomposition import SearchConfig, decompose
from .errors import InvalidInputError, SpiderError
from .estimation import load_matrix, matrix_to_dict, read_corpus, unigram_estimate

TOOL = "spider-pid"

RESULT_SCHEMA = "spider-result/1"
ERROR_SCHEMA = "spider-result-error/1"


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def write_manifest(path: Path, command: str, params: dict, inputs: Sequence[Path]) -> None:
    manifest = {
        "schema": "spider-manifest/1",
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "params": params,
        "inputs": [{"name": p.name, "sha256": _sha256(p)} for p in inputs],
    }
    path.write_text(_dumps(manifest) + "\n", encoding="utf-8")


def _resolve_jobs(jobs: Optional[int]) -> int:
    if jobs is None:
        env = os.environ.get("SPIDER_JOBS")
        if env:
            try:
                jobs = int(env)
            except ValueError:
                raise InvalidInputError(f"SPIDER_JOBS must be an integer, got {env!r}")
        else:
            jobs = os.cpu_count() or 1
    if jobs < 1:
        raise InvalidInputError("--jobs must be >= 1")
    return jobs


def _pmap(fn, items, jobs: int):
    """Map preserving input order; pooled only when it pays off."""
    items = list(items)
    if jobs == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


def _safe_name(instance_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", instance_id) or "instance"


# -- score --------------------------------------------------------------


def _score_one(args) -> dict:
    instance, gamma, alpha, weighting = args
    matrix = unigram_estimate(
        instance, smoothing_alpha=alpha, gamma=gamma, weighting=weighting
    )
    return matrix_to_dict(matrix)


def cmd_score(args: argparse.Namespace) -> int:
    corpus_path = Path(args.corpus)
    out_dir = Path(args.out_dir)
    if args.estimator == "external":
        raise InvalidInputError(
            "estimator 'external' does not score anything here: run the lm-scorer "
            "package to produce spider-pmi/1 files, then pass them to `spider decompose`"
        )
    instances = read_corpus(corpus_path)
    out_dir.mkdir(parents=True, exist_ok=True)

    jobs = _resolve_jobs(args.jobs)
    written: list[Path] = []
    try:
        payloads = _pmap(
            _score_one,
            [(inst, args.gamma, args.alpha, args.weighting) for inst in instances],
            jobs,
        )
        for idx, (instance, payload) in enumerate(zip(instances, payloads)):
            path = out_dir / f"{idx:05d}__{_safe_name(instance.instance_id)}.pmi.json"
            path.write_text(
                json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1) + "\n",
                encoding="utf-8",
            )
            written.append(path)
    except Exception:
        for path in written:
            path.unlink(missing_ok=True)
        raise

    write_manifest(
        out_dir / "manifest.json",
        "score",
        {
            "estimator": args.estimator,
            "gamma": args.gamma,
            "alpha": args.alpha,
            "weighting": args.weighting,
        },
        [corpus_path],
    )
    print(f"scored {len(written)} instance(s) into {out_dir}")
    return 0


# -- decompose ----------------------------------------------------------


def _search_config(args: argparse.Namespace) -> SearchConfig:
    return SearchConfig(
        mode=args.mode,
        beam_width=args.beam_width,
        max_collection_size=args.max_collection_size,
        exact_limit=args.exact_limit,
        tol=args.tol,
        patience=args.patience,
    )


def _decompose_one(task) -> dict:
    path, config = task
    try:
        matrix = load_matrix(path)
        return decompose(matrix, config).to_dict()
    except (SpiderError, OSError) as exc:
        return {"schema": ERROR_SCHEMA, "path": Path(path).name, "error": str(exc)}


def _expand_globs(patterns: Sequence[str], what: str) -> list[Path]:
    paths: list[Path] = []
    for pattern in patterns:
        paths.extend(Path(p) for p in globlib.glob(pattern))
    paths = sorted(set(paths))
    if not paths:
        raise InvalidInputError(f"no {what} files match {patterns}")
    return paths


def cmd_decompose(args: argparse.Namespace) -> int:
    paths = _expand_globs(args.matrices, "matrix")
    config = _search_config(args)
    jobs = _resolve_jobs(args.jobs)

    lines = _pmap(_decompose_one, [(p, config) for p in paths], jobs)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    failures = 0
    with open(out_path, "w", encoding="utf-8") as handle:
        for line in lines:
            if line.get("schema") == ERROR_SCHEMA:
                failures += 1
                print(f"error: {line['path']}: {line['error']}", file=sys.stderr)
            handle.write(_dumps(line) + "\n")

    write_manifest(
        Path(str(out_path) + ".manifest.json"),
        "decompose",
        {
            "mode": config.mode,
            "beam_width": config.beam_width,
            "max_collection_size": config.max_collection_size,
            "exact_limit": config.exact_limit,
            "tol": config.tol,
            "patience": config.patience,
        },
        paths,
    )
    print(f"decomposed {len(paths) - failures}/{len(paths)} matrices into {out_path}")
    return 1 if failures else 0


# -- analyze ------------------------------------------------------------


def _read_results(paths: Sequence[Path]) -> tuple[list[ResultRecord], int]:
    records: list[ResultRecord] = []
    skipped_raw_only = 0
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    data = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise InvalidInputError(f"{path}:{line_no}: not valid JSON: {exc}")
                schema = data.get("schema")
                if schema == ERROR_SCHEMA:
                    continue
                if schema != RESULT_SCHEMA:
                    raise InvalidInputError(
                        f"{path}:{line_no}: schema {schema!r} does not match {RESULT_SCHEMA!r}"
                    )
                if not data.get("normalized"):
                    skipped_raw_only += 1
                    continue
                records.append(ResultRecord.from_result_dict(data))
    return records, skipped_raw_only


def cmd_analyze(args: argparse.Namespace) -> int:
    paths = _expand_globs(args.results, "result")
    records, skipped_raw_only = _read_results(paths)
    report = build_report(records, args.group_by, skipped_raw_only=skipped_raw_only)

    out_path = Path(args.report)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if args.format == "json":
        out_path.write_text(
            json.dumps(report, ensure_ascii=False, sort_keys=True, indent=1) + "\n",
            encoding="utf-8",
        )
    else:
        write_report_csv(report, out_path)

    write_manifest(
        Path(str(out_path) + ".manifest.json"),
        "analyze",
        {"group_by": args.group_by, "format": args.format},
        paths,
    )
    print(f"analyzed {len(records)} record(s) into {out_path}")
    return 0


# -- parser -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spider",
        description="Decompose summary-source mutual information into PID components.",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser("score", help="estimate PMI matrices for a JSONL corpus")
    score.add_argument("corpus", help="instance corpus (JSON Lines)")
    score.add_argument("--out-dir", dest="out_dir", required=True)
    score.add_argument("--estimator", choices=("unigram", "external"), default="unigram")
    score.add_argument("--gamma", type=float, default=0.1, help="shared-type bonus of the unigram joint")
    score.add_argument("--alpha", type=float, default=1.0, help="add-alpha smoothing")
    score.add_argument("--weighting", choices=("uniform", "likelihood"), default="uniform")
    score.add_argument("--jobs", type=int, default=None)
    score.set_defaults(func=cmd_score)

    dec = sub.add_parser("decompose", help="run PID on spider-pmi/1 matrix files")
    dec.add_argument("matrices", nargs="+", help="matrix file glob(s)")
    dec.add_argument("--out", required=True, help="result file (JSON Lines)")
    dec.add_argument("--mode", choices=("auto", "exact", "beam"), default="auto")
    dec.add_argument("--beam-width", dest="beam_width", type=int, default=5)
    dec.add_argument("--max-collection-size", dest="max_collection_size", type=int, default=None)
    dec.add_argument("--exact-limit", dest="exact_limit", type=int, default=20)
    dec.add_argument("--tol", type=float, default=1e-9)
    dec.add_argument("--patience", type=int, default=4)
    dec.add_argument("--jobs", type=int, default=None)
    dec.set_defaults(func=cmd_decompose)

    ana = sub.add_parser("analyze", help="aggregate result files into a report")
    ana.add_argument("results", nargs="+", help="result file glob(s)")
    ana.add_argument("--report", required=True, help="report output path")
    ana.add_argument("--group-by", dest="group_by", choices=GROUP_BYS, default="dataset")
    ana.add_argument("--format", choices=("json", "csv"), default="json")
    ana.set_defaults(func=cmd_analyze)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpiderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
