"""Exception types shared across the package."""


class HetnetError(Exception):
    """Base class for all package errors."""


class InvalidParam(HetnetError, ValueError):
    """A parameter is outside its mathematical domain."""


class NonConvergence(HetnetError, RuntimeError):
    """A series / continued fraction / iteration failed to converge."""


class DegenerateInput(HetnetError, ValueError):
    """Input renders the requested computation singular (e.g. zero pivot)."""


class InfeasibleMarginals(HetnetError, ValueError):
    """Cache marginals are not realizable (T_n > 1 or sum(T) != C2)."""


class InstanceTooLarge(HetnetError, ValueError):
    """Combinatorial instance exceeds the configured cap."""


class NoEligibleServer(HetnetError, RuntimeError):
    """No base station in the window can serve the request."""


class InfeasibleSum(HetnetError, RuntimeError):
    """Bisection bracket cannot satisfy the sum constraint (data error)."""


class NonMonotoneCCP(HetnetError, RuntimeError):
    """The convex-concave iteration decreased its objective (gradient bug)."""


class MaxIters(HetnetError, RuntimeError):
    """Iterative solver hit its iteration cap without a successful step."""


class ConfigError(HetnetError, ValueError):
    """Experiment config violates the documented schema."""
