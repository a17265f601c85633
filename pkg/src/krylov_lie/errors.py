"""Exception types raised across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class TruncationError(DomainError):
    """A truncated chain carries more weight in its last level than allowed."""


class NoRealLogarithmError(DomainError):
    """The group element has no logarithm with real Cartan component.

    Happens for SU(1,1) elements with trace below -2, which lie outside the
    image of the exponential map.
    """


class IntegrationError(RuntimeError):
    """The ODE integrator failed or a trajectory left its admissible region."""


class ConfigError(ValueError):
    """Malformed scenario configuration."""
