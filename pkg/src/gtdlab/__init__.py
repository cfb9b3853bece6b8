"""gtdlab: generalized trigonometric densities, differential-escort transforms,
cumulative moments and sharp information inequalities."""

__version__ = "0.1.0"

from .errors import (ConsistencyError, ConvergenceError, DispatchError, DomainError,  # noqa: E402
                     GtdlabError, InfeasibleError, ParameterError)
from .densities import Density, parse_density  # noqa: E402

__all__ = ["__version__", "Density", "parse_density", "GtdlabError", "ParameterError",
           "DispatchError", "DomainError", "ConvergenceError", "InfeasibleError",
           "ConsistencyError"]
