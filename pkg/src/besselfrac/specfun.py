"""Special functions: gamma, Bessel J0/J1/J2 and the Mittag-Leffler function.

The Mittag-Leffler function is only needed on the non-positive real axis,
where every mode of the diffusion problem lives (arguments are
``-lambda_k**2 * t**alpha``).  Three evaluation regimes are used:

* ``series``     -- the defining Taylor series, for small ``|z|`` when the
  largest term stays moderate (no catastrophic cancellation);
* ``asymptotic`` -- the algebraic expansion
  ``E_a(-x) ~ sum_{n>=1} (-1)**(n+1) x**-n / Gamma(1 - a n)`` for large ``x``,
  truncated at its smallest term;
* ``crossover``  -- everything else, through the finite-interval integral

      E_a(-x) = 1/(a pi) * int_0^{a pi} exp(-(x sin(s) / sin(a pi - s))**(1/a)) ds

  whose integrand lies in ``(0, 1]`` and decreases pointwise in ``x``.  This
  form also covers ``a = 1`` exactly, where it collapses to ``exp(-x)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, PoleError

__all__ = [
    "FracOrder",
    "MLRegime",
    "MLValue",
    "gamma",
    "bessel_j",
    "mittag_leffler",
    "ml",
    "Z_SWITCH",
    "Z_BIG",
]

# nominal regime boundaries, as magnitudes of the (negative) argument
Z_SWITCH = 5.0
Z_BIG = 50.0
# the Taylor series is abandoned once a term exceeds this (loses ~3 digits)
_SERIES_PEAK_LIMIT = 1e3


@dataclass(frozen=True)
class FracOrder:
    """Caputo order ``alpha`` in (0, 1) together with the final time ``horizon``."""

    alpha: float
    horizon: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0) or not math.isfinite(self.alpha):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not (self.horizon > 0.0) or not math.isfinite(self.horizon):
            raise DomainError(f"horizon T must be positive, got {self.horizon!r}")

    @property
    def T(self) -> float:
        return self.horizon


class MLRegime(str, enum.Enum):
    SERIES = "series"
    ASYMPTOTIC = "asymptotic"
    CROSSOVER = "crossover"


@dataclass(frozen=True)
class MLValue:
    value: float
    regime: MLRegime

    def __float__(self) -> float:
        return self.value


# ---------------------------------------------------------------------------
# gamma


def gamma(x: float) -> float:
    """Gamma function of a real argument.

    Negative non-integer arguments go through the reflection formula
    ``Gamma(x) Gamma(1 - x) = pi / sin(pi x)``.
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"gamma has a pole at {x!r}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * math.gamma(1.0 - x))
    return math.gamma(x)


def _rgamma(x: float) -> float:
    """1/Gamma(x), zero at the poles."""
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    if x > 171.0:
        return math.exp(-math.lgamma(x))
    return 1.0 / gamma(x)


# ---------------------------------------------------------------------------
# Bessel functions of the first kind, orders 0, 1, 2

_SERIES_MAX_X = 8.0
_HANKEL_MIN_X = 20.0
_SERIES_TERMS = 40
_HANKEL_TERMS = 36
_MILLER_START = 64


def _bessel_series(nu: int, x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    q = -half * half
    term = half**nu / math.factorial(nu)
    total = term.copy()
    for m in range(1, _SERIES_TERMS):
        term = term * q / (m * (m + nu))
        total += term
    return total


def _bessel_miller(nu: int, x: np.ndarray) -> np.ndarray:
    # backward recurrence J_{n-1} = (2n/x) J_n - J_{n+1}, normalised by
    # J_0 + 2 sum_k J_{2k} = 1
    nxt = np.zeros_like(x)
    cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    wanted = np.zeros_like(x)
    for n in range(_MILLER_START, 0, -1):
        prev = (2.0 * n / x) * cur - nxt
        nxt, cur = cur, prev
        # cur now holds J_{n-1}
        if (n - 1) == nu:
            wanted = cur.copy()
        if (n - 1) > 0 and (n - 1) % 2 == 0:
            norm += 2.0 * cur
    norm += cur
    return wanted / norm


def _bessel_hankel(nu: int, x: np.ndarray) -> np.ndarray:
    mu = 4.0 * nu * nu
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    a = 1.0
    xk = np.ones_like(x)
    for k in range(_HANKEL_TERMS):
        if k > 0:
            a *= (mu - (2 * k - 1) ** 2) / (8.0 * k)
            xk = xk * x
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * a / xk
        else:
            q += sign * a / xk
    chi = x - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j(nu: int, x):
    """Bessel function of the first kind ``J_nu(x)`` for ``nu`` in {0, 1, 2}.

    Power series for ``x <= 8``, Miller's backward recurrence on ``(8, 20)``
    and the Hankel asymptotic form with its correction series for
    ``x >= 20``.  Accepts scalars or arrays; ``x`` must be non-negative.
    """
    if nu not in (0, 1, 2):
        raise DomainError(f"only orders 0, 1, 2 are supported, got {nu!r}")
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0):
        raise DomainError("bessel_j requires finite x >= 0")
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    small = flat <= _SERIES_MAX_X
    large = flat >= _HANKEL_MIN_X
    mid = ~(small | large)
    if small.any():
        out[small] = _bessel_series(nu, flat[small])
    if mid.any():
        out[mid] = _bessel_miller(nu, flat[mid])
    if large.any():
        out[large] = _bessel_hankel(nu, flat[large])
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)


# ---------------------------------------------------------------------------
# Mittag-Leffler


def _ml_series(alpha: float, x: float) -> float | None:
    """Sum of (-x)**k / Gamma(alpha k + 1); None if cancellation is too severe."""
    total = 1.0
    prev = 1.0
    lx = math.log(x)
    for k in range(1, 20000):
        arg = alpha * k + 1.0
        if arg < 170.0:
            mag = x**k / math.gamma(arg)
        else:
            mag = math.exp(k * lx - math.lgamma(arg))
        if mag > _SERIES_PEAK_LIMIT:
            return None
        total += -mag if k % 2 else mag
        if mag < 1e-17 and mag < prev:
            return total
        prev = mag
    return None


def _ml_asymptotic(alpha: float, x: float) -> float:
    # 1/Gamma(1 - a n) = Gamma(a n) sin(pi a n) / pi, so Gamma(a n) / (pi x**n)
    # bounds each term; stop at the smallest bound
    lx = math.log(x)
    total = 0.0
    best = math.inf
    for n in range(1, 2000):
        an = alpha * n
        log_env = math.lgamma(an) - n * lx - math.log(math.pi)
        if log_env > best:
            break
        best = log_env
        term = math.exp(log_env) * math.sin(math.pi * an)
        total += term if n % 2 else -term
        if log_env < -45.0:
            break
    return total


def _ml_integral(alpha: float, x: float) -> float:
    width = alpha * math.pi
    sin_width = math.sin(width)
    inv_alpha = 1.0 / alpha

    def integrand(s: float) -> float:
        if s <= 0.0:
            return 0.0
        den = math.sin(width - s)
        if den <= 0.0:
            return 0.0
        return math.exp(-((x * math.sin(s) / den) ** inv_alpha))

    # the integrand switches from 0 to 1 in a boundary layer at s = 0 whose
    # width scales like sin(a pi) / x; bracket it geometrically
    scale = max(sin_width, 1e-300) * min(1.0, 1.0 / x)
    points = []
    p = scale
    while p < width:
        points.append(p)
        p *= 10.0
    value, _ = quad(
        integrand, 0.0, width, points=points or None, epsabs=1e-15, epsrel=1e-13, limit=500
    )
    return value / width


def mittag_leffler(alpha: float, z: float) -> MLValue:
    """One-parameter Mittag-Leffler function ``E_alpha(z)`` for ``z <= 0``.

    ``alpha`` may be any value in ``(0, 1]``; ``alpha = 1`` gives ``exp(z)``.
    The returned :class:`MLValue` records which regime produced the value.
    """
    alpha = float(alpha)
    z = float(z)
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    if not (z <= 0.0) or math.isinf(z):
        raise DomainError(f"mittag_leffler needs finite z <= 0, got {z!r}")
    x = -z
    if x == 0.0:
        return MLValue(1.0, MLRegime.SERIES)
    if x <= Z_SWITCH:
        value = _ml_series(alpha, x)
        if value is not None:
            return MLValue(value, MLRegime.SERIES)
    elif x >= Z_BIG and alpha < 1.0:
        return MLValue(_ml_asymptotic(alpha, x), MLRegime.ASYMPTOTIC)
    return MLValue(_ml_integral(alpha, x), MLRegime.CROSSOVER)


def ml(alpha: float, z: float) -> float:
    """Shorthand for ``mittag_leffler(alpha, z).value``."""
    return mittag_leffler(alpha, z).value
