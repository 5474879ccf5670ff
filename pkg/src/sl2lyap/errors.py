"""Exception types shared across the package."""


class Sl2LyapError(Exception):
    """Base class for all package-specific errors."""


class PoleError(Sl2LyapError, ValueError):
    """Evaluation requested at a pole of the function."""


class AccuracyError(Sl2LyapError):
    """A numerical routine could not reach the requested tolerance.

    The achieved tolerance, when known, is stored in ``achieved``.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class SingularModelError(Sl2LyapError):
    """The model parameters make an operator singular (e.g. chi vanishing)."""


class NoInvariantMeasureError(Sl2LyapError):
    """No decaying solution of the stationarity equation was found.

    ``suspected`` is True when the condition was inferred from a failed
    numerical search rather than from a closed-form argument.
    """

    def __init__(self, message, suspected=False):
        super().__init__(message)
        self.suspected = suspected


class ReductionBreakdownError(Sl2LyapError):
    """Reduction of order hit a zero of the base solution."""


class DegenerateOrbitError(Sl2LyapError, ValueError):
    """A boundary action left the coordinate chart."""


class NumericError(Sl2LyapError):
    """Linear-algebra failure; carries a condition estimate when available."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class HeavyTailError(Sl2LyapError):
    """Effective sample size of an exponential-moment estimate collapsed."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class StiffnessError(Sl2LyapError):
    """Adaptive ODE step size collapsed."""


class RegularisationError(Sl2LyapError):
    """The integrand that should be regular at the origin is not."""


class UnderflowWarning(UserWarning):
    """Result underflowed to zero in a controlled way."""
