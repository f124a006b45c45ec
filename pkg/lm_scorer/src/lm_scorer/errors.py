class ScorerError(Exception):
    """Base class for all lm-scorer errors."""


class StartupError(ScorerError):
    """The configured language model could not be loaded."""


class InvalidCorpusError(ScorerError):
    """The input corpus could not be parsed."""


class SegmentationError(ScorerError):
    """Raw text could not be segmented into sentences."""


class InvalidConfigError(ScorerError):
    """A ScorerConfig field is out of range."""
