"""Exception types shared across the package."""


class UncproxyError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(UncproxyError):
    """An argument violates an operation's precondition."""


class EmptyInputError(UncproxyError):
    """An operation that needs at least one element received none."""


class DegenerateInputError(UncproxyError):
    """A statistic is undefined for the given data (e.g. zero variance)."""


class UnlabeledSampleError(UncproxyError):
    """A sample has no usable annotation counts after column exclusion."""


class SchemaMismatchError(UncproxyError):
    """A file header does not match the label schema."""


class LabelParseError(UncproxyError):
    """A labels file row could not be parsed."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class JoinError(UncproxyError):
    """Predictions and annotations could not be joined on sample id."""


class TrainingDivergedError(UncproxyError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch: int, message: str | None = None):
        super().__init__(message or f"training diverged at epoch {epoch}")
        self.epoch = epoch


class InvalidCoverageError(UncproxyError):
    """A rejection-curve coverage value selects an empty or invalid kept set."""


class ConfigError(UncproxyError):
    """A run configuration file is missing, malformed, or inconsistent."""


class DataFormatError(UncproxyError):
    """An on-disk artifact (params, prediction log, report) is malformed."""
