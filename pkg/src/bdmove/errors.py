"""Exception types shared across the package."""


class BdmoveError(Exception):
    """Base class for all package errors."""


class PointOutsideDomain(BdmoveError):
    """A coordinate vector lies outside the domain W."""


class IndexOutOfRange(BdmoveError):
    """A point index does not address a point of the configuration."""


class EmptyConfiguration(BdmoveError):
    """An operation that needs at least one point got the empty configuration."""


class NonSimpleConfiguration(BdmoveError):
    """An operation restricted to simple configurations got duplicate points."""


class UnboundedDomain(BdmoveError):
    """An operation that needs a bounded W got an unbounded domain."""


class SingularGradient(BdmoveError):
    """Gradient requested at the singular point of a singular pair potential."""


class RejectionBudgetExceeded(BdmoveError):
    """A rejection sampler used up its proposal budget."""


class ZeroIntensity(BdmoveError):
    """A jump was requested from a state with total intensity zero."""


class UnsupportedFamily(BdmoveError):
    """A closed-form answer was requested for an opaque, non-parametric input."""


class NotErgodic(BdmoveError):
    """A stationary quantity was requested for a chain that fails the ergodicity check."""


class ThinningBoundViolated(BdmoveError):
    """The intensity exceeded its declared upper bound alpha_star during simulation."""


class NegativeKernelMass(BdmoveError):
    """The coupled jump kernel produced a negative branch mass (invalid dominating rates)."""


class NonFiniteState(BdmoveError):
    """A mover produced a non-finite coordinate (step size or taming misconfigured)."""


class ConfigError(BdmoveError):
    """A run configuration file failed validation."""
