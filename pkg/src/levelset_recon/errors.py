"""Exception hierarchy for reconstruction failures."""

from typing import Optional


class ReconstructionError(Exception):
    """Base class for all reconstruction errors."""


class NumericalFailure(ReconstructionError):
    """A numerical procedure failed to converge or degenerated."""

    def __init__(self, message: str, residual: Optional[float] = None,
                 iteration: Optional[int] = None) -> None:
        super().__init__(message)
        self.residual = residual
        self.iteration = iteration


class InstabilityError(NumericalFailure):
    """An explicit time step produced non-finite or exploding values."""


class PointCloudFormatError(ReconstructionError, ValueError):
    """A point-cloud file could not be parsed."""

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None) -> None:
        location = path or "<input>"
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}")
        self.path = path
        self.line = line


class EmptyZeroSetError(ReconstructionError):
    """The zero level set is empty (the reconstruction vanished)."""
