"""Linking probability of spider-web crossbar networks: exact, asymptotic and simulated."""

from .errors import ConvergenceError, RegimeError, ThresholdError
from .netgraph import NetworkParams, PathDigits, VertexId

__all__ = [
    "ConvergenceError",
    "NetworkParams",
    "PathDigits",
    "RegimeError",
    "ThresholdError",
    "VertexId",
]

__version__ = "0.1.0"
