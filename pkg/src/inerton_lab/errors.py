"""Exception types shared across the package."""


class InertonLabError(Exception):
    """Base class for all package errors."""


class DomainError(InertonLabError, ValueError):
    """An input lies outside the domain where a relation is defined."""


class UsageError(InertonLabError, ValueError):
    """A caller passed structurally invalid arguments (sizes, counts, empty data)."""


class IntegrationError(InertonLabError, RuntimeError):
    """The ODE integrator could not reach the requested end time.

    ``last_state`` carries the last successfully computed state, when known.
    """

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class NumericalBlowupError(IntegrationError):
    """The integrated state became non-finite."""


class ConfigError(InertonLabError, ValueError):
    """A run configuration could not be parsed or validated."""

    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line
