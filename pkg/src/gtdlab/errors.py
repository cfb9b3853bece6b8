"""Exception hierarchy shared by all modules."""


class GtdlabError(Exception):
    """Base class for library errors."""


class ParameterError(GtdlabError, ValueError):
    """Invalid parameter combination."""


class DispatchError(ParameterError):
    """Parameters belong to a different family constructor."""


class DomainError(GtdlabError, ValueError):
    """Argument outside the domain of a function, or a divergent integral."""


class ConvergenceError(GtdlabError, ArithmeticError):
    """An iterative solver failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InfeasibleError(GtdlabError, ValueError):
    """A moment problem has no solution in the requested family."""


class ConsistencyError(GtdlabError, ArithmeticError):
    """Two independent evaluation routes disagree."""
