"""Exception types shared across the library.

Every error the CLI maps to a distinct exit code lives here so that the
library modules and the command-line front end agree on the taxonomy.
"""


class PlindexError(Exception):
    """Base class for all library errors."""


class EmptyInputError(PlindexError, ValueError):
    """An operation that requires at least one point received none."""


class MalformedInputError(PlindexError, ValueError):
    """Input violates a structural precondition (ordering, coverage, range)."""


class CapacityError(PlindexError, ValueError):
    """Input exceeds a configured size cap (e.g. the DP oracle limit)."""


class ConfigError(PlindexError, ValueError):
    """A configuration value violates a module precondition."""


class ConstraintError(PlindexError, ValueError):
    """A data constraint was violated (e.g. duplicate key in a clustered index)."""


class MissingSampleError(PlindexError, KeyError):
    """A cost-model query referenced an error threshold that was never profiled."""


class InfeasibleConstraintError(PlindexError, ValueError):
    """No candidate satisfies the requested latency or storage constraint.

    Carries the best achievable value so callers can report how far off the
    request was.
    """

    def __init__(self, message, best_value=None, best_error=None):
        super().__init__(message)
        self.best_value = best_value
        self.best_error = best_error
