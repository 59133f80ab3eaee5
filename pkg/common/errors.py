"""
Exception hierarchy shared by every polysparse package.

Anything the library raises on purpose derives from PolysparseError, so the CLI and the
HTTP router can separate user-facing failures from programming errors with a single except.
Non-fatal outcomes (solver iteration cap, greedy infeasibility, sign ambiguity) are reported
through status flags on the result objects instead.
"""


class PolysparseError(Exception):
    """Base class for all library errors."""


class BasisOverflowError(PolysparseError, OverflowError):
    """Monomial counting exceeded the 64-bit index range or the configured basis cap."""


class DimensionMismatchError(PolysparseError, ValueError):
    """Vector or matrix shapes do not agree with the monomial basis."""


class SystemFormatError(PolysparseError, ValueError):
    """A polynomial system file could not be parsed or validated."""


class AllZeroMatrixError(PolysparseError, ValueError):
    """The coefficient matrix has no nonzero column."""


class ZeroColumnError(PolysparseError, ValueError):
    """A coherence computation met a zero column of the coefficient matrix."""

    def __init__(self, columns, linear: bool = False):
        self.columns = list(columns)
        self.linear = linear
        if linear:
            hint = (
                "a linear monomial column is zero, so x cannot be read from the first n entries "
                "of the lifted vector; solve with a group method and rely on pure-nonlinear "
                "extraction, or pass --allow-truncation to certify the truncated matrix"
            )
        else:
            hint = (
                "drop the zero columns and certify the truncated matrix "
                "(pass --allow-truncation / allow_truncation=True)"
            )
        super().__init__(f"zero columns {self.columns}: {hint}")


class InfeasibleEqualityError(PolysparseError):
    """The measurement vector is not reachable through the constraint set."""


class NumericalBreakdownError(PolysparseError, FloatingPointError):
    """A solver iterate became non-finite."""


class NegativeEvenPowerError(PolysparseError, ValueError):
    """An even-power estimate is negative beyond tolerance, so no real root exists."""


class GreedyBudgetError(PolysparseError):
    """Exact greedy search exceeded its least-squares solve budget."""


class UnknownMethodError(PolysparseError, KeyError):
    """A method identifier is not registered."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown method"


class UnknownPresetError(PolysparseError, KeyError):
    """An experiment preset name is not defined."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown preset"
