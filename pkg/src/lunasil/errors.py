"""Exception and warning types shared across the package."""


class LunasilError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(LunasilError):
    """A configuration file is missing, unreadable, or inconsistent."""


class ParseError(LunasilError):
    """A data file could not be parsed; message includes the line number."""


class ValidationError(LunasilError):
    """Inputs violate a documented precondition."""


class SolverError(LunasilError):
    """The steady-state solver failed to converge."""


class IntegrationError(LunasilError):
    """The transient integrator went unstable or produced non-finite state."""


class InfeasibleError(LunasilError):
    """A requested operating point cannot be reached (e.g. negative heater
    power would be needed to hold a setpoint)."""


class GridClampWarning(UserWarning):
    """A tabulated quantity was queried outside its grid and clamped."""


class ModelRangeWarning(UserWarning):
    """A model was evaluated outside its documented validity range."""
