"""CLI front end mirroring the pipeline's score command.

Exit codes: 0 success, 2 usage or startup error.
"""

import argparse
import sys
from typing import Optional, Sequence

from . import __version__
from .config import ORDERS, ScorerConfig
from .errors import ScorerError
from .scorer import TOOL, score_corpus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spider-lm",
        description="Score instance corpora into spider-pmi/1 matrix files with a causal LM.",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser("score", help="score a JSONL corpus into matrix files")
    score.add_argument("corpus", help="instance corpus (JSON Lines)")
    score.add_argument("--out-dir", dest="out_dir", required=True)
    score.add_argument("--model", default="gpt2-large", help="HF model id or 'cache'")
    score.add_argument("--device", default="cpu")
    score.add_argument("--batch-size", dest="batch_size", type=int, default=8)
    score.add_argument("--max-seq-len", dest="max_seq_len", type=int, default=512)
    score.add_argument("--order", choices=ORDERS, default="s_then_d")
    score.add_argument("--separator", default=" ")
    score.set_defaults(func=cmd_score)
    return parser


def cmd_score(args: argparse.Namespace) -> int:
    config = ScorerConfig(
        model=args.model,
        device=args.device,
        batch_size=args.batch_size,
        max_seq_len=args.max_seq_len,
        order=args.order,
        separator=args.separator,
    )
    written = score_corpus(args.corpus, args.out_dir, config)
    print(f"scored {len(written)} instance(s) into {args.out_dir}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScorerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
