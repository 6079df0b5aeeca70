"""Fourier-Bessel eigenbasis of the radial problem X'' + X'/x + lambda^2 X = 0, X(1) = 0.

Eigenfunctions are ``J0(lambda_k x)`` with ``lambda_k`` the positive zeros of
``J0``.  Coefficients are obtained with the weight ``x``::

    c_k = 2 / J1(lambda_k)**2 * int_0^1 x f(x) J0(lambda_k x) dx
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import BasisMismatchError, ConvergenceError, DegenerateDecayError, DomainError
from .specfun import bessel_j

__all__ = [
    "BesselBasis",
    "SpectralField",
    "GridFunction",
    "Quadrature",
    "compute_zeros",
    "default_quad_order",
    "gauss_legendre",
    "analyze",
    "synthesize",
    "synthesize_first_derivative",
    "synthesize_second_derivative",
    "decay_exponent",
    "weighted_l2_norm",
    "partial_sum_deltas",
    "DEFAULT_K",
]

DEFAULT_K = 50
_NEWTON_MAXITER = 50
_ZERO_TOL = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BesselBasis:
    zeros: np.ndarray
    norms: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "zeros", _frozen(self.zeros))
        object.__setattr__(self, "norms", _frozen(self.norms))
        if self.zeros.ndim != 1 or self.zeros.size == 0:
            raise DomainError("a basis needs at least one zero")
        if self.zeros.shape != self.norms.shape:
            raise BasisMismatchError("zeros and norms differ in length")
        if np.any(np.diff(self.zeros) <= 0):
            raise DomainError("zeros must be strictly increasing")
        if self.zeros[0] < 1.0:
            raise DomainError("eigenvalues below 1 would break the steady-state division")
        if np.any(self.norms <= 0):
            raise DomainError("normalisation constants must be positive")

    @property
    def size(self) -> int:
        return int(self.zeros.size)

    def truncate(self, K: int) -> "BesselBasis":
        if not 1 <= K <= self.size:
            raise BasisMismatchError(f"cannot truncate a basis of size {self.size} to {K}")
        return BesselBasis(self.zeros[:K], self.norms[:K])


@dataclass(frozen=True)
class SpectralField:
    """A function on [0, 1] given by its Fourier-Bessel coefficients."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = _frozen(self.coeffs)
        if c.ndim != 1 or c.size == 0:
            raise DomainError("coefficient list must be one-dimensional and non-empty")
        if not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def basis_size(self) -> int:
        return int(self.coeffs.size)

    @classmethod
    def zeros(cls, K: int) -> "SpectralField":
        return cls(np.zeros(K))

    @classmethod
    def unit(cls, k: int, K: int) -> "SpectralField":
        """Single eigenmode ``J0(lambda_k x)`` (1-based ``k``) in a size-``K`` basis."""
        if not 1 <= k <= K:
            raise DomainError(f"mode {k} outside 1..{K}")
        c = np.zeros(K)
        c[k - 1] = 1.0
        return cls(c)

    def truncate(self, K: int) -> "SpectralField":
        return SpectralField(self.coeffs[:K])

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.coeffs - other.coeffs)

    def __mul__(self, a: float) -> "SpectralField":
        return SpectralField(a * self.coeffs)

    __rmul__ = __mul__


@dataclass(frozen=True)
class GridFunction:
    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        x = _frozen(self.nodes)
        v = _frozen(self.values)
        if x.ndim != 1 or x.shape != v.shape:
            raise DomainError("nodes and values must be 1-D arrays of equal length")
        if x.size and (x[0] < 0.0 or x[-1] > 1.0):
            raise DomainError("nodes must lie in [0, 1]")
        if np.any(np.diff(x) <= 0):
            raise DomainError("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "values", v)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


@dataclass(frozen=True)
class Quadrature:
    """Gauss-Legendre rule on [0, 1]."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "weights", _frozen(self.weights))

    @property
    def order(self) -> int:
        return int(self.nodes.size)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def default_quad_order(K: int) -> int:
    return max(64, 4 * K)


def gauss_legendre(order: int) -> Quadrature:
    if order < 1:
        raise DomainError("quadrature order must be positive")
    s, w = np.polynomial.legendre.leggauss(order)
    return Quadrature(0.5 * (s + 1.0), 0.5 * w)


# ---------------------------------------------------------------------------


def _newton_zero(k: int) -> float:
    lam = k * math.pi - 0.25 * math.pi
    for _ in range(_NEWTON_MAXITER):
        # J0' = -J1
        step = bessel_j(0, lam) / bessel_j(1, lam)
        lam += step
        if abs(step) <= 4.0 * np.finfo(float).eps * lam:
            break
    else:
        raise ConvergenceError(f"Newton iteration for zero {k} did not converge")
    if abs(bessel_j(0, lam)) > _ZERO_TOL:
        raise ConvergenceError(f"zero {k} polished only to |J0| = {abs(bessel_j(0, lam)):.3e}")
    return lam


def compute_zeros(count: int) -> BesselBasis:
    """First ``count`` positive zeros of J0 and the constants J1(lambda_k)**2.

    Each zero is seeded at ``k pi - pi/4`` and polished by Newton's method
    independently of the others, so prefixes agree bitwise across sizes.
    """
    if int(count) != count or count < 1:
        raise DomainError(f"basis size must be a positive integer, got {count!r}")
    zeros = np.array([_newton_zero(k) for k in range(1, int(count) + 1)])
    norms = bessel_j(1, zeros) ** 2
    return BesselBasis(zeros, norms)


def _check_quad(basis: BesselBasis, quad: Quadrature) -> None:
    if quad.order < 4 * basis.size:
        raise BasisMismatchError(
            f"quadrature order {quad.order} is below 4K = {4 * basis.size}"
        )


FunctionLike = Union[GridFunction, Callable[[np.ndarray], np.ndarray]]


def _sample(f: FunctionLike, x: np.ndarray) -> np.ndarray:
    if isinstance(f, GridFunction):
        if f.nodes.size < 4:
            raise DomainError("cubic interpolation needs at least 4 samples")
        return CubicSpline(f.nodes, f.values)(x)
    return np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)


def analyze(f: FunctionLike, basis: BesselBasis, quad: Quadrature | None = None) -> SpectralField:
    """Fourier-Bessel coefficients of ``f`` by Gauss-Legendre quadrature.

    ``f`` is either a vectorised callable on [0, 1] or a :class:`GridFunction`,
    which is cubic-spline interpolated onto the quadrature nodes.
    """
    if quad is None:
        quad = gauss_legendre(default_quad_order(basis.size))
    _check_quad(basis, quad)
    x = quad.nodes
    fx = _sample(f, x)
    wx = quad.weights * x * fx
    coeffs = np.empty(basis.size)
    for i, lam in enumerate(basis.zeros):
        coeffs[i] = 2.0 / basis.norms[i] * np.dot(wx, bessel_j(0, lam * x))
    return SpectralField(coeffs)


def _points(x) -> np.ndarray:
    pts = np.atleast_1d(np.asarray(x, dtype=float))
    if pts.ndim != 1:
        raise DomainError("evaluation points must be one-dimensional")
    if pts.size and (pts.min() < 0.0 or pts.max() > 1.0):
        raise DomainError("evaluation points must lie in [0, 1]")
    return pts


def _check_size(field: SpectralField, basis: BesselBasis) -> None:
    if field.basis_size > basis.size:
        raise BasisMismatchError(
            f"field has {field.basis_size} coefficients but the basis only {basis.size}"
        )


def _series(field: SpectralField, basis: BesselBasis, x, profile) -> GridFunction:
    _check_size(field, basis)
    pts = _points(x)
    total = np.zeros_like(pts)
    # fixed ascending-k summation order
    for c, lam in zip(field.coeffs, basis.zeros):
        total = total + c * profile(lam, pts)
    return GridFunction(pts, total)


def synthesize(field: SpectralField, basis: BesselBasis, x) -> GridFunction:
    """Partial sum ``sum_k c_k J0(lambda_k x)`` at the points ``x``."""
    return _series(field, basis, x, lambda lam, p: bessel_j(0, lam * p))


def synthesize_first_derivative(field: SpectralField, basis: BesselBasis, x) -> GridFunction:
    """Term-wise x-derivative, ``-sum_k c_k lambda_k J1(lambda_k x)``."""
    return _series(field, basis, x, lambda lam, p: -lam * bessel_j(1, lam * p))


def synthesize_second_derivative(field: SpectralField, basis: BesselBasis, x) -> GridFunction:
    """Term-wise second derivative via ``J0'' = (J2 - J0) / 2``; regular at x = 0."""
    return _series(
        field,
        basis,
        x,
        lambda lam, p: 0.5 * lam * lam * (bessel_j(2, lam * p) - bessel_j(0, lam * p)),
    )


def weighted_l2_norm(field: SpectralField, basis: BesselBasis) -> float:
    """``sqrt(int_0^1 x f(x)**2 dx)`` of the truncated series (Parseval)."""
    _check_size(field, basis)
    n = basis.norms[: field.basis_size]
    return float(np.sqrt(np.sum(field.coeffs**2 * n) / 2.0))


def decay_exponent(field: SpectralField, basis: BesselBasis) -> float:
    """Least-squares slope of ``log|c_k|`` against ``log lambda_k`` over the tail half.

    Coefficients that are exactly zero are left out of the fit.
    """
    _check_size(field, basis)
    c = np.abs(field.coeffs)
    if np.count_nonzero(c) < 10:
        raise DomainError("decay fit needs at least 10 nonzero coefficients")
    K = field.basis_size
    tail = slice(K // 2, K)
    ct = c[tail]
    lt = basis.zeros[:K][tail]
    if np.all(ct < 1e-15):
        raise DegenerateDecayError("machine-precision decay: all tail coefficients below 1e-15")
    keep = ct > 0
    slope, _ = np.polyfit(np.log(lt[keep]), np.log(ct[keep]), 1)
    return float(slope)


def partial_sum_deltas(
    field: SpectralField, basis: BesselBasis, ks: Sequence[int], x, profile=synthesize
) -> list[float]:
    """Sup-norm differences between consecutive partial sums ``S_{k_{i+1}} - S_{k_i}``."""
    ks = list(ks)
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise DomainError("truncation list must be strictly increasing")
    sums = []
    for K in ks:
        sub = field.truncate(min(K, field.basis_size))
        sums.append(profile(sub, basis, x).values)
    return [float(np.max(np.abs(b - a))) for a, b in zip(sums, sums[1:])]
