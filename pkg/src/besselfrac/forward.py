"""Direct solvers for the time-fractional diffusion equation with Bessel operator.

Each Fourier-Bessel mode obeys ``D^a u_k + lambda_k**2 u_k = h_k`` with
``u_k(0) = g_k``, solved by

    u_k(t) = (g_k - h_k / lambda_k**2) E_a(-lambda_k**2 t**a) + h_k / lambda_k**2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .basis import BesselBasis, GridFunction, SpectralField, synthesize
from .errors import BasisMismatchError, DomainError
from .specfun import FracOrder, ml

__all__ = [
    "ModeTrajectory",
    "Propagator",
    "mode_trajectories",
    "propagate",
    "solve_forward_homogeneous",
    "solve_forward_with_source",
]


class Propagator:
    """Evaluates ``E_a(-lambda**2 t**a)``; optionally memoised on ``(lambda, t)``."""

    def __init__(self, alpha: float, memoize: bool = False):
        self.alpha = float(alpha)
        self.memoize = memoize
        if memoize:
            self._cached = lru_cache(maxsize=None)(self._eval)

    def _eval(self, lam: float, t: float) -> float:
        return ml(self.alpha, -(lam * lam) * t**self.alpha)

    def __call__(self, lam: float, t: float) -> float:
        lam, t = float(lam), float(t)
        if t == 0.0:
            return 1.0
        if self.memoize:
            return self._cached(lam, t)
        return self._eval(lam, t)


@dataclass(frozen=True)
class ModeTrajectory:
    """``t -> amplitude * E_a(-lam**2 t**a) + steady`` for mode ``k`` (1-based)."""

    k: int
    lam: float
    amplitude: float
    steady: float
    alpha: float
    propagator: Propagator | None = field(default=None, compare=False, repr=False)

    def __call__(self, t: float) -> float:
        prop = self.propagator or Propagator(self.alpha)
        return self.amplitude * prop(self.lam, t) + self.steady

    def sample(self, times) -> np.ndarray:
        return np.array([self(t) for t in np.atleast_1d(times)])


def _check_time(t: float, frac: FracOrder) -> float:
    t = float(t)
    if not (0.0 <= t <= frac.horizon):
        raise DomainError(f"time {t!r} outside [0, T={frac.horizon!r}]")
    return t


def _check_fields(basis: BesselBasis, *fields: SpectralField) -> int:
    sizes = {f.basis_size for f in fields}
    if len(sizes) != 1:
        raise BasisMismatchError(f"fields have differing sizes {sorted(sizes)}")
    K = sizes.pop()
    if K > basis.size:
        raise BasisMismatchError(f"fields have {K} coefficients but the basis only {basis.size}")
    return K


def mode_trajectories(
    g: SpectralField,
    frac: FracOrder,
    basis: BesselBasis,
    h: SpectralField | None = None,
    memoize: bool = False,
) -> list[ModeTrajectory]:
    """Per-mode solutions for initial data ``g`` and optional stationary source ``h``."""
    if h is None:
        h = SpectralField(np.zeros(g.basis_size))
    K = _check_fields(basis, g, h)
    prop = Propagator(frac.alpha, memoize=memoize)
    out = []
    for i in range(K):
        lam = float(basis.zeros[i])
        steady = h.coeffs[i] / (lam * lam)
        out.append(
            ModeTrajectory(i + 1, lam, float(g.coeffs[i] - steady), float(steady), frac.alpha, prop)
        )
    return out


def propagate(
    g: SpectralField,
    frac: FracOrder,
    basis: BesselBasis,
    t: float,
    h: SpectralField | None = None,
    memoize: bool = False,
) -> SpectralField:
    """Coefficients of ``u(., t)``."""
    t = _check_time(t, frac)
    return SpectralField([m(t) for m in mode_trajectories(g, frac, basis, h, memoize)])


def solve_forward_homogeneous(
    g: SpectralField, frac: FracOrder, basis: BesselBasis, t: float, x
) -> GridFunction:
    """``u(x, t) = sum_k g_k E_a(-lambda_k**2 t**a) J0(lambda_k x)``."""
    return synthesize(propagate(g, frac, basis, t), basis, x)


def solve_forward_with_source(
    g: SpectralField, h: SpectralField, frac: FracOrder, basis: BesselBasis, t: float, x
) -> GridFunction:
    """Solution with a time-independent source ``h``; reduces to the homogeneous one for h = 0."""
    return synthesize(propagate(g, frac, basis, t, h), basis, x)
