"""Sequence log-likelihood backends.

Both backends expose ``score(texts)`` returning one ``SequenceScore`` per
text, where ``log_prob`` is the sum of per-token log-likelihoods under a
causal model. The cache backend is a deterministic stand-in that needs no
downloaded weights: each token is scored by mixing a uniform base
distribution over the corpus vocabulary with the token's relative frequency
in the preceding context, so repeated content is more probable, which is
the one property pmi estimation needs.
"""

import math
import re
from dataclasses import dataclass
from typing import Sequence

from .config import ScorerConfig
from .errors import StartupError

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

CACHE_MODEL = "cache"

_CACHE_WEIGHT = 0.5


@dataclass(frozen=True)
class SequenceScore:
    log_prob: float
    n_tokens: int
    truncated: bool


def _tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class CacheLM:
    """Uniform-base language model with a copy cache over the context."""

    def __init__(self, config: ScorerConfig, corpus_texts: Sequence[str]):
        self.config = config
        vocab = set()
        for text in corpus_texts:
            vocab.update(_tokens(text))
        if not vocab:
            raise StartupError("cache model needs a corpus with at least one token")
        # One extra slot is the bucket for tokens unseen in the corpus.
        self._log_base = -math.log(len(vocab) + 1)

    def score(self, texts: Sequence[str]) -> list[SequenceScore]:
        return [self._score_one(text) for text in texts]

    def _score_one(self, text: str) -> SequenceScore:
        tokens = _tokens(text)
        truncated = len(tokens) > self.config.max_seq_len
        if truncated:
            tokens = tokens[: self.config.max_seq_len]
        base = math.exp(self._log_base)
        counts: dict[str, int] = {}
        log_prob = 0.0
        for t, token in enumerate(tokens):
            cache = counts.get(token, 0) / t if t else 0.0
            log_prob += math.log((1.0 - _CACHE_WEIGHT) * base + _CACHE_WEIGHT * cache)
            counts[token] = counts.get(token, 0) + 1
        return SequenceScore(log_prob, len(tokens), truncated)


class TransformersLM:
    """Causal LM scoring through the transformers library."""

    def __init__(self, config: ScorerConfig):
        try:
            import torch
            from transformers import AutoModelForCausalLM, AutoTokenizer
        except ImportError as exc:
            raise StartupError(
                f"model {config.model!r} needs the transformers extra installed: {exc}"
            ) from exc
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(config.model)
            self.model = AutoModelForCausalLM.from_pretrained(config.model)
        except Exception as exc:
            raise StartupError(f"could not load model {config.model!r}: {exc}") from exc
        self.torch = torch
        self.config = config
        self.model.to(config.device)
        self.model.eval()

    def score(self, texts: Sequence[str]) -> list[SequenceScore]:
        scores = []
        for start in range(0, len(texts), self.config.batch_size):
            scores.extend(self._score_batch(texts[start : start + self.config.batch_size]))
        return scores

    def _score_batch(self, texts: Sequence[str]) -> list[SequenceScore]:
        torch = self.torch
        bos = self.tokenizer.bos_token_id
        results = []
        with torch.no_grad():
            for text in texts:
                ids = self.tokenizer.encode(text)
                truncated = len(ids) + 1 > self.config.max_seq_len
                if truncated:
                    ids = ids[: self.config.max_seq_len - 1]
                # A BOS prefix lets the first real token be scored too.
                full = torch.tensor([[bos, *ids]], device=self.config.device)
                logits = self.model(full).logits[0, :-1]
                log_probs = torch.log_softmax(logits, dim=-1)
                picked = log_probs[range(len(ids)), ids]
                results.append(SequenceScore(float(picked.sum()), len(ids), truncated))
        return results


def load_backend(config: ScorerConfig, corpus_texts: Sequence[str]):
    if config.model == CACHE_MODEL:
        return CacheLM(config, corpus_texts)
    return TransformersLM(config)
