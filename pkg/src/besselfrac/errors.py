"""Exception types shared across the package."""

from __future__ import annotations


class BesselFracError(Exception):
    """Base class for all package errors."""


class DomainError(BesselFracError, ValueError):
    """An argument lies outside the supported domain."""


class PoleError(DomainError):
    """Gamma function evaluated at a non-positive integer."""


class ConvergenceError(BesselFracError, ArithmeticError):
    """An iterative method failed to reach its tolerance."""


class BasisMismatchError(BesselFracError, ValueError):
    """Coefficients, basis and quadrature do not fit together."""


class IllPosednessError(BesselFracError, ArithmeticError):
    """Reconstruction of a mode would overflow double precision.

    ``mode`` is the 1-based index of the first offending mode.
    """

    def __init__(self, message: str, mode: int):
        super().__init__(message)
        self.mode = mode


class DegenerateDecayError(BesselFracError, ValueError):
    """Tail coefficients are at machine-precision level; no slope can be fitted."""
