"""Exception hierarchy.

Errors fall into three families that the command line maps onto exit
codes: configuration problems (2), numerical failures such as divergent
sums (3) and data problems such as short histories (4).
"""

from __future__ import annotations


class TvArmaError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(TvArmaError, ValueError):
    """Invalid parameters, malformed specifications or bad arguments."""


class LagOutOfRange(ConfigError, IndexError):
    """A coefficient was requested for a lag outside ``1..order``."""


class OracleCapExceeded(ConfigError):
    """The determinant oracle was asked for a matrix larger than its cap."""


class NumericalError(TvArmaError, ArithmeticError):
    """A quantity that should exist numerically does not."""


class NonSummable(NumericalError):
    """An infinite sum of Green weights failed to converge."""


class NotInvertible(NumericalError):
    """The moving-average side Green weights are not absolutely summable."""


class ConditionViolated(NumericalError):
    """A moment condition of a random-coefficient model fails."""


class Assumption1Violated(NumericalError):
    """An outer regime of a broken AR model is not second-order stationary."""


class DataError(TvArmaError):
    """Input data cannot support the requested computation."""


class OutOfWindow(DataError, KeyError):
    """A table-backed path was queried outside the times it covers."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class InsufficientHistory(DataError):
    """The observed history is too short for the truncation requested.

    Attributes
    ----------
    required : int or None
        Estimated number of observations that would be needed.
    """

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class SeriesTooShort(DataError):
    """A series is shorter than the segmentation constraints allow."""
