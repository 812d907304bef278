"""Exception hierarchy for ruinbound."""


class RuinBoundError(Exception):
    """Base class for all package errors."""


class ConfigError(RuinBoundError, ValueError):
    """A spec or config record failed validation."""


class NonDivisibleFamily(ConfigError):
    """The target law has no closed-form w-th convolution root."""


class ZeroVariance(RuinBoundError, ValueError):
    """Correlation requested for a degenerate (zero-variance) innovation."""


class ModelMismatch(RuinBoundError, ValueError):
    """Operation is not defined for the requested risk model."""


class VarianceUnbounded(RuinBoundError, ValueError):
    """Estimator of E[exp(R S_n)] would have infinite variance."""


class SolverError(RuinBoundError):
    """Adjustment-coefficient solve failed."""


class NetProfitViolated(SolverError):
    """Expected discounted claim is not below the expected premium."""


class NumericalOverflow(SolverError):
    """MGF evaluation overflowed inside its domain before the bracket closed."""
