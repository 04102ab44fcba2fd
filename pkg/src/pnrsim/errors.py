"""Exception hierarchy shared by all pnrsim modules.

The CLI maps these onto distinct exit codes (see ``pnrsim.cli``):
configuration errors exit 2, numeric failures exit 3, degenerate
inputs exit 4.
"""


class PnrsimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(PnrsimError):
    """Invalid parameter values or malformed configuration input."""


class DimensionMismatchError(ConfigurationError):
    """Vector/matrix sizes are incompatible and no truncation policy was given."""


class NumericError(PnrsimError):
    """A numeric procedure failed (non-convergence, singular system)."""

    def __init__(self, message, best_iterate=None):
        super().__init__(message)
        self.best_iterate = best_iterate


class SingularSystemError(NumericError):
    """Linear system has a zero diagonal entry and cannot be back-substituted."""


class DegenerateInputError(PnrsimError):
    """Input distribution has no mass in the subspace an operation conditions on."""


class UndefinedConditionalError(DegenerateInputError):
    """A conditional probability has zero denominator (undefined, not 0 or 1)."""
