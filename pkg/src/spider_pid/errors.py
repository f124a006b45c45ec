"""Exception types shared across the package."""


class SpiderError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(SpiderError):
    """An argument violates a precondition (non-finite value, bad enum, ...)."""


class InvalidInstanceError(SpiderError):
    """An instance cannot be scored (e.g. empty vocabulary)."""


class BudgetExceededError(SpiderError):
    """Exact enumeration was requested for a problem larger than the limit."""

    def __init__(self, n_columns: int, limit: int):
        self.n_columns = n_columns
        self.limit = limit
        super().__init__(
            f"exact enumeration over {n_columns} source sentences exceeds "
            f"the limit of {limit} (2^{n_columns} candidates)"
        )


class MatrixParseError(SpiderError):
    """A matrix file violates the spider-pmi/1 schema."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


class MatrixIntegrityError(SpiderError):
    """Stored values are mutually inconsistent beyond tolerance."""


class NormalizationUndefinedError(SpiderError):
    """Normalization was requested with a non-positive total MI."""

    def __init__(self, total_mi: float):
        self.total_mi = total_mi
        super().__init__(f"cannot normalize: total mutual information is {total_mi}")


class EmptyReportError(SpiderError):
    """Aggregation was requested over an empty record set."""


class CannotGenerateError(SpiderError):
    """Unrelated-instance generation is impossible for this corpus."""
