"""Exception types raised across the package."""


class NNFluxError(Exception):
    """Base class for all package errors."""


class InvalidStateError(NNFluxError, ValueError):
    """A state vector is not admissible for the PDE (e.g. negative depth)."""


class DryStateError(InvalidStateError):
    """An operation that needs positive depth received h <= 0."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConvergenceError(NNFluxError, RuntimeError):
    pass


class DivergenceError(NNFluxError, RuntimeError):
    """Training loss became non-finite."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class FormatError(NNFluxError, ValueError):
    """Malformed dataset, model, or mesh file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DimensionMismatchError(NNFluxError, ValueError):
    pass


class ConfigError(NNFluxError, ValueError):
    pass


class SimulationFailure(NNFluxError, RuntimeError):
    """A finite-volume run could not continue.

    Carries the structured failure record written by the harness.
    """

    def __init__(self, reason, time, cell=None, face=None):
        msg = f"simulation failed at t={time:.6g}: {reason}"
        if face is not None:
            msg += f" (face {face})"
        if cell is not None:
            msg += f" (cell {cell})"
        super().__init__(msg)
        self.reason = reason
        self.time = time
        self.cell = cell
        self.face = face

    def record(self):
        return {
            "status": "failed",
            "time": self.time,
            "cell": self.cell,
            "face": self.face,
            "reason": self.reason,
        }
