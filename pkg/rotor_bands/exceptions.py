# coding=utf-8

"""
Error kinds raised across the package.

Usage-class errors derive from :class:`InvalidInput` (and therefore from
:class:`ValueError`); the command line maps them to exit status 2.
Every other :class:`RotorBandsException` is a computational failure.
"""

from typing import Optional


class RotorBandsException(Exception):
    """Base class of every error raised by rotor_bands."""


class InvalidInput(RotorBandsException, ValueError):
    """Arguments outside the documented domain of an operation."""


class NotAResonance(InvalidInput):
    """The quasi-momentum does not satisfy the resonance condition."""


class UnsupportedParams(InvalidInput):
    """Valid resonance parameters that the requested construction does not cover."""


class InvalidBand(InvalidInput):
    """Band index out of range for the resonance order."""


class GridMismatch(InvalidInput):
    """Angle grid not compatible with the resonance length."""


class InsufficientData(InvalidInput):
    """Too few samples for a fit."""


class NotUnitary(RotorBandsException):
    """Matrix violates the unitarity tolerance."""

    def __init__(self, defect: float, tolerance: float):
        super().__init__("matrix is not unitary: max|U*U - I| = %.3e exceeds %.1e" % (defect, tolerance))
        self.defect = defect
        self.tolerance = tolerance


class ConvergenceFailure(RotorBandsException):
    """The eigensolver did not converge."""


class TrackingAmbiguity(RotorBandsException):
    """Two candidate continuations of a band are indistinguishable."""

    def __init__(self, message: str, grid_index: Optional[int] = None, theta: Optional[float] = None):
        super().__init__(message)
        self.grid_index = grid_index
        self.theta = theta


class PoleHit(RotorBandsException):
    """Resolvent evaluated on an unperturbed eigenvalue."""


class BudgetExceeded(RotorBandsException):
    """Composition enumeration would exceed the allowed exponent."""


class DegenerateResidue(RotorBandsException):
    """An interior path node shares the eigenvalue of the band being expanded."""


class DegenerateFactor(RotorBandsException):
    """A factor of the diagonal product vanishes."""
