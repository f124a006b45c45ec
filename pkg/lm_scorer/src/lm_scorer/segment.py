"""Deterministic rule-based sentence segmentation.

A boundary is a run of sentence-ending punctuation followed by whitespace
and an upper-case letter, digit, or opening quote, unless the token in
front of the punctuation is a known abbreviation. Tokens with internal
periods ("U.S.") never split mid-token, and a following lower-case word
("economy") suppresses the boundary entirely.
"""

import re

from .errors import SegmentationError

SEGMENTER_ID = "rule/1"

ABBREVIATIONS = frozenset(
    {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "rev.", "gen.", "sen.", "rep.",
        "st.", "jr.", "sr.", "no.", "vs.", "etc.", "e.g.", "i.e.", "cf.",
        "fig.", "figs.", "eq.", "approx.", "inc.", "ltd.", "co.", "corp.",
        "u.s.", "u.k.", "u.n.", "a.m.", "p.m.", "jan.", "feb.", "mar.",
        "apr.", "jun.", "jul.", "aug.", "sep.", "sept.", "oct.", "nov.", "dec.",
    }
)

_BOUNDARY = re.compile(r"[.!?]+(?=\s+[\"'(\[]?[A-Z0-9])")


def segment(raw_text: str) -> list[str]:
    """Split raw text into sentences; already-split sentences pass through."""
    text = raw_text.strip()
    if not text:
        raise SegmentationError("cannot segment empty text")

    sentences = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        end = match.end()
        preceding = text[start:end].rsplit(None, 1)[-1].lower()
        if preceding in ABBREVIATIONS:
            continue
        sentences.append(text[start:end].strip())
        start = end
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences
