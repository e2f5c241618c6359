"""Uncertainty operators, Naimark extensions and entropic bounds for finite-dimensional POVMs."""

from .errors import DimensionError, DomainError, NumericError
from .povm import OutcomeDistribution, Povm, QuantumState, ValuedPovm
from .naimark import NaimarkExtension, extend
from .optimize import OptimizerConfig
from .entropy import BoundReport

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "DimensionError",
    "DomainError",
    "NaimarkExtension",
    "NumericError",
    "OptimizerConfig",
    "OutcomeDistribution",
    "Povm",
    "QuantumState",
    "ValuedPovm",
    "extend",
    "__version__",
]
