"""Brute-force verifiers, deliberately independent of the production code paths.

Nothing here imports :mod:`besselfrac.specfun` or :mod:`besselfrac.basis`.
Extended precision comes from mpmath; Bessel values for the adaptive
integrals come from scipy.  These routines favour transparency over speed
and are meant for tests and verification runs only.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np
from scipy import special as _sp

from .errors import DomainError

__all__ = [
    "L1Scheme",
    "InstabilityError",
    "IntegrationDepthWarning",
    "caputo_l1",
    "l1_time_stepper",
    "adaptive_integral",
    "ml_series",
    "gamma_stirling",
    "j0_series",
    "j0_fast",
    "j1_fast",
    "bisect",
    "j0_zeros_bisection",
]


class InstabilityError(ArithmeticError):
    """The L1 marching produced a value that more than doubled in one step."""


class IntegrationDepthWarning(UserWarning):
    """Adaptive Simpson hit its recursion limit; the best estimate is returned."""


# ---------------------------------------------------------------------------
# L1 Caputo scheme


@dataclass(frozen=True)
class L1Scheme:
    alpha: float
    dt: float
    n_steps: int

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("L1 scheme needs 0 < alpha < 1")
        if not self.dt > 0 or self.n_steps < 2:
            raise DomainError("L1 scheme needs dt > 0 and at least 2 steps")

    @property
    def horizon(self) -> float:
        return self.n_steps * self.dt

    @property
    def weights(self) -> np.ndarray:
        """``b_j = (j + 1)**(1 - a) - j**(1 - a)`` for ``j = 0 .. N - 1``."""
        p = np.arange(self.n_steps + 1, dtype=float) ** (1.0 - self.alpha)
        return np.diff(p)

    @property
    def scale(self) -> float:
        # dt**-a / Gamma(2 - a), Gamma from mpmath to stay off the main code path
        return self.dt ** (-self.alpha) / float(mpmath.gamma(2.0 - self.alpha))


def caputo_l1(samples, alpha: float, dt: float) -> np.ndarray:
    """L1 approximation of the Caputo derivative on a uniform grid.

    ``samples[n]`` is ``f(n dt)``; entry ``n`` of the result approximates the
    derivative at ``n dt`` (entry 0 is set to 0).
    """
    f = np.asarray(samples, dtype=float)
    scheme = L1Scheme(alpha, dt, f.size - 1)
    b = scheme.weights
    d = np.diff(f)
    out = np.zeros_like(f)
    # out[n] = scale * sum_{j=0}^{n-1} b_j (f_{n-j} - f_{n-j-1})
    out[1:] = scheme.scale * np.convolve(b, d)[: d.size]
    return out


def l1_time_stepper(
    g,
    alpha: float,
    lam,
    dt: float,
    n_steps: int,
    h=0.0,
) -> np.ndarray:
    """Implicit L1 marching for ``D^a u + lam**2 u = h``, ``u(0) = g``.

    ``g``, ``lam`` and ``h`` may be scalars or equal-length arrays (one entry
    per mode).  Returns samples of shape ``(n_steps + 1,)`` or
    ``(n_steps + 1, modes)``.
    """
    scheme = L1Scheme(alpha, dt, n_steps)
    g_arr, lam_arr, h_arr = np.broadcast_arrays(
        np.atleast_1d(np.asarray(g, float)),
        np.atleast_1d(np.asarray(lam, float)),
        np.atleast_1d(np.asarray(h, float)),
    )
    b = scheme.weights
    c = scheme.scale
    m = g_arr.size
    u = np.empty((n_steps + 1, m))
    u[0] = g_arr
    diffs = np.empty((n_steps, m))
    denom = c + lam_arr**2
    for n in range(1, n_steps + 1):
        if n > 1:
            # sum_{j=1}^{n-1} b_j (u^{n-j} - u^{n-j-1})
            hist = b[1:n] @ diffs[n - 2 :: -1][: n - 1]
        else:
            hist = 0.0
        u[n] = (h_arr + c * (u[n - 1] - hist)) / denom
        diffs[n - 1] = u[n] - u[n - 1]
        if n >= 2:
            grow = (np.abs(u[n]) > 2.0 * np.abs(u[n - 1])) & (np.abs(u[n]) > floor)
            if np.any(grow):
                raise InstabilityError(f"L1 marching unstable at step {n}")
        else:
            floor = 1e-12 * np.maximum(np.abs(u[0]), np.abs(u[1]))
    if np.ndim(g) == 0 and np.ndim(lam) == 0 and np.ndim(h) == 0:
        return u[:, 0]
    return u


# ---------------------------------------------------------------------------
# adaptive Simpson


def adaptive_integral(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-12, max_depth: int = 50
) -> float:
    """Adaptive Simpson quadrature with the classical ``|S2 - S1| / 15`` estimate."""
    if not a < b:
        raise DomainError("adaptive_integral needs a < b")
    if not tol > 0:
        raise DomainError("tolerance must be positive")

    def simpson(fa, fm, fb, lo, hi):
        return (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = simpson(fa, fm, fb, a, b)
    total = 0.0
    comp = 0.0
    hit_limit = False
    # explicit stack: (lo, hi, f(lo), f(mid), f(hi), estimate, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, est, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = simpson(flo, flm, fmid, lo, mid)
        right = simpson(fmid, frm, fhi, mid, hi)
        delta = left + right - est
        if (depth >= 4 and abs(delta) <= 15.0 * eps) or depth >= max_depth:
            if depth >= max_depth and abs(delta) > 15.0 * eps:
                hit_limit = True
            piece = left + right + delta / 15.0
            # Kahan summation keeps thousands of panels from drifting
            y = piece - comp
            t = total + y
            comp = (t - total) - y
            total = t
            continue
        stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
        stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    if hit_limit:
        warnings.warn(
            f"adaptive Simpson reached depth {max_depth}; returning best estimate",
            IntegrationDepthWarning,
            stacklevel=2,
        )
    return total


# ---------------------------------------------------------------------------
# extended precision special functions


def ml_series(alpha: float, z: float, digits: int = 30) -> float:
    """Mittag-Leffler function by direct summation of its Taylor series.

    The working precision is raised by the size of the largest term so that
    ``digits`` significant digits survive the cancellation.  Cost grows
    quickly with ``|z|`` for small ``alpha``; keep arguments moderate.
    """
    if not 0 < alpha <= 1:
        raise DomainError("alpha must lie in (0, 1]")
    if z == 0:
        return 1.0
    x = abs(float(z))
    lx = math.log(x)
    peak = 0.0
    k = 0
    while True:
        lt = k * lx - math.lgamma(alpha * k + 1.0)
        peak = max(peak, lt)
        if k > 5 and lt < peak - 10.0 and lt < -(digits + 10) * math.log(10.0):
            break
        k += 1
    with mpmath.workdps(int(peak / math.log(10.0)) + digits + 10):
        a = mpmath.mpf(alpha)
        zz = mpmath.mpf(z)
        total = mpmath.mpf(0)
        power = mpmath.mpf(1)
        for j in range(k + 1):
            total += power * mpmath.rgamma(a * j + 1)
            power *= zz
        return float(total)


def gamma_stirling(x: float, shift: int = 200, digits: int = 50) -> float:
    """Gamma via upward shift by ``shift`` and the Stirling series, at high precision.

    ``Gamma(x) = Gamma(x + N) / (x (x + 1) ... (x + N - 1))``.
    """
    if x <= 0 and x == math.floor(x):
        raise DomainError("pole of gamma")
    with mpmath.workdps(digits):
        xx = mpmath.mpf(x)
        prod = mpmath.mpf(1)
        for j in range(shift):
            prod *= xx + j
        y = xx + shift
        lg = (y - mpmath.mpf(0.5)) * mpmath.log(y) - y + mpmath.log(2 * mpmath.pi) / 2
        for m in range(1, 20):
            lg += mpmath.bernoulli(2 * m) / (2 * m * (2 * m - 1) * y ** (2 * m - 1))
        return float(mpmath.exp(lg) / prod)


def j0_series(x: float, digits: int = 50) -> float:
    """J0 from its power series at ``digits`` decimal digits."""
    with mpmath.workdps(digits + int(abs(x) / 2.3) + 5):
        q = (mpmath.mpf(x) / 2) ** 2
        term = mpmath.mpf(1)
        total = term
        m = 0
        while True:
            m += 1
            term *= -q / (m * m)
            total += term
            if abs(term) < mpmath.mpf(10) ** (-digits) and m > q:
                break
        return float(total)


def j0_fast(x):
    return _sp.j0(x)


def j1_fast(x):
    return _sp.j1(x)


def bisect(f: Callable[[float], float], a: float, b: float, tol: float = 1e-15) -> float:
    """Plain bisection on a sign-changing bracket."""
    fa = f(a)
    fb = f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    if (fa > 0) == (fb > 0):
        raise DomainError("bisection bracket does not change sign")
    while b - a > tol * max(1.0, abs(a)):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = f(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def j0_zeros_bisection(count: int, step: float = 0.25) -> list[float]:
    """First ``count`` positive zeros of J0 by scanning for sign changes of the power series."""
    zeros = []
    a = step
    fa = j0_series(a)
    while len(zeros) < count:
        b = a + step
        fb = j0_series(b)
        if (fa > 0) != (fb > 0):
            zeros.append(bisect(j0_series, a, b))
        a, fa = b, fb
    return zeros
