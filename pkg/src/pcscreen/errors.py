"""Exception hierarchy.

Two broad families matter for the CLI exit-code contract: configuration
problems (exit 1) and data problems (exit 2). Everything derives from
PCScreenError so library users can catch one type.
"""


class PCScreenError(Exception):
    """Base class for all pcscreen errors."""


class ConfigError(PCScreenError):
    """Invalid configuration: bad thresholds, window sizes, flag combinations."""


class SynthSpecError(ConfigError):
    """Invalid or infeasible synthetic-market specification."""


class DataError(PCScreenError):
    """Problem with input data rather than configuration."""


class ParseError(DataError):
    """Malformed CSV row. Carries the 1-based line number when known."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class DuplicateKeyError(DataError):
    """Two rows share the same (date, ticker) key."""


class UnknownEventError(DataError):
    """Dividend event references a (ticker, date) cell absent from the panel."""


class EmptyUniverseError(DataError):
    """No ticker survived completeness filtering."""


class InsufficientHistoryError(DataError):
    """Too few observations for the requested computation."""


class DegenerateSeriesError(DataError):
    """A return series has zero sample variance. Carries the ticker."""

    def __init__(self, ticker: str):
        super().__init__(f"return series for {ticker!r} has zero sample variance")
        self.ticker = ticker


class ConvergenceError(DataError):
    """Eigensolver failed to converge. Should not happen for valid
    correlation matrices; treated as a defect signal."""
