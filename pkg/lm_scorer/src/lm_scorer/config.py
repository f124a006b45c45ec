from dataclasses import dataclass

from .errors import InvalidConfigError

ORDERS = ("s_then_d", "d_then_s", "symmetric")


@dataclass(frozen=True)
class ScorerConfig:
    """Settings for turning sentence pairs into joint log-probabilities.

    ``model`` selects the backend: the built-in deterministic cache language
    model (``"cache"``) or any Hugging Face causal LM identifier, defaulting
    to the GPT-2 large checkpoint. ``order`` controls how a summary sentence
    s and a source sentence d are concatenated before scoring the joint;
    ``symmetric`` averages both orders so pmi is order invariant.
    """

    model: str = "gpt2-large"
    device: str = "cpu"
    batch_size: int = 8
    max_seq_len: int = 512
    order: str = "s_then_d"
    separator: str = " "

    def __post_init__(self):
        if self.order not in ORDERS:
            raise InvalidConfigError(f"order must be one of {ORDERS}, got {self.order!r}")
        if self.batch_size < 1:
            raise InvalidConfigError("batch_size must be >= 1")
        if self.max_seq_len < 2:
            raise InvalidConfigError("max_seq_len must be >= 2")
        if not self.model:
            raise InvalidConfigError("model must be non-empty")
