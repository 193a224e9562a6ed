"""Neural-network surrogates of the Godunov flux for finite-volume solvers."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DimensionMismatchError,
    DivergenceError,
    DryStateError,
    FormatError,
    InvalidStateError,
    NNFluxError,
    SimulationFailure,
)
from .physics import PdeKind, PdeSystem

__version__ = "0.1.0"
