"""Exception types shared across the toolkit.

The CLI maps these to distinct exit codes (config errors -> 2, solver
failures -> 3), so library code should raise the most specific class.
"""


class HktError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(HktError, ValueError):
    """Invalid configuration, file schema, or argument combination."""


class InputDomainError(HktError, ValueError):
    """Input outside the documented domain of an operation."""


class BemSolverError(HktError, RuntimeError):
    """Inflow-angle root finder failed; carries bracket diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SolverFailure(HktError, RuntimeError):
    """Optimizer could not produce a usable point."""


class IntegrationError(HktError, RuntimeError):
    """Time integration produced a non-finite state."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t
