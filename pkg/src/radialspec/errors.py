"""Exception hierarchy for the radial series solvers.

Everything raised on purpose by this package derives from
:class:`RadialSpecError`, so callers can catch one type at the CLI
boundary.  The finer-grained classes mark conditions a caller may want
to react to programmatically (retry with a larger truncation order,
raise the working precision, widen the search window, ...).
"""


class RadialSpecError(Exception):
    """Base class for all errors raised by radialspec."""


class DomainError(RadialSpecError):
    """Inputs leave the mathematical domain of the method.

    Raised e.g. when the 1/r^2 coefficient is too attractive for a
    normalizable solution to exist, or when the indicial exponents
    degenerate so that no acceptable power-series solution remains.
    """


class ConvergenceError(RadialSpecError):
    """A series or iteration cannot reach the requested accuracy."""


class ConfinementError(RadialSpecError):
    """Confinement radius incompatible with the potential expansion."""


class PrecisionError(RadialSpecError):
    """Catastrophic cancellation exceeded the working precision."""


class ResolutionError(RadialSpecError):
    """Sign changes could not be separated after maximum refinement."""


class InterleaveError(RadialSpecError):
    """Value/derivative root pattern broken; truncation order too small
    or precision exhausted."""


class InsufficientRError(RadialSpecError):
    """Matching radius too small to expose the requested states."""


class NoConvergence(RadialSpecError):
    """An iterative certification ran out of steps before reaching its
    tolerance."""


class NoSignChange(RadialSpecError):
    """A bisection target does not change sign over the given window."""


class GridError(RadialSpecError):
    """Finite-difference eigenvalues failed the grid-consistency check."""


class ConfigError(RadialSpecError):
    """Invalid run configuration (CLI or config file)."""
