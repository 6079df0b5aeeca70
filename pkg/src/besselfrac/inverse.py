"""Inverse-initial and inverse-source reconstructions.

Inverse initial: from final data ``f = u(., T)`` recover ``g = u(., 0)``,
mode by mode ``g_k = f_k / E_a(-lambda_k**2 T**a)``.

Inverse source: from ``g`` and ``f`` recover the stationary source ``h``,
with ``C_k = (g_k - f_k) / (1 - E_a(-lambda_k**2 T**a))`` and
``h_k = lambda_k**2 (g_k - C_k)``.

Both are exact per mode; the only regularisation is spectral truncation plus
an optional cutoff that zeroes modes whose amplification exceeds a threshold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import BesselBasis, GridFunction, SpectralField, synthesize
from .errors import BasisMismatchError, DomainError, IllPosednessError
from .forward import ModeTrajectory, Propagator, mode_trajectories
from .specfun import FracOrder

__all__ = [
    "Problem",
    "ReconstructionReport",
    "amplification_profile",
    "invert_initial",
    "invert_source",
    "add_noise",
    "RESIDUAL_NODES",
]

RESIDUAL_NODES = 101
_OVERFLOW = 1e308


class Problem(str, enum.Enum):
    INITIAL = "initial"
    SOURCE = "source"


@dataclass
class ReconstructionReport:
    problem: Problem
    solution: list[ModeTrajectory]
    amplification: np.ndarray
    truncation: int
    residual: float
    recovered_initial: SpectralField | None = None
    recovered_source: SpectralField | None = None
    dropped_modes: list[int] = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)

    @property
    def recovered(self) -> SpectralField:
        return self.recovered_initial if self.problem is Problem.INITIAL else self.recovered_source


def _final_propagators(frac: FracOrder, basis: BesselBasis, K: int) -> np.ndarray:
    prop = Propagator(frac.alpha)
    return np.array([prop(lam, frac.horizon) for lam in basis.zeros[:K]])


def amplification_profile(frac: FracOrder, basis: BesselBasis, problem="initial") -> np.ndarray:
    """Per-mode factors by which data errors are magnified.

    ``1 / E_a(-lambda_k**2 T**a)`` for the initial problem and
    ``lambda_k**2 / (1 - E_a(-lambda_k**2 T**a))`` for the source problem.
    """
    problem = Problem(problem)
    e = _final_propagators(frac, basis, basis.size)
    if problem is Problem.INITIAL:
        return 1.0 / e
    return basis.zeros**2 / (1.0 - e)


def _guard(data: np.ndarray, amp: np.ndarray, kept: np.ndarray) -> None:
    with np.errstate(divide="ignore"):
        log_mag = np.log(np.abs(data)) + np.log(amp)
    bad = np.nonzero(kept & (log_mag > math.log(_OVERFLOW)))[0]
    if bad.size:
        k = int(bad[0]) + 1
        raise IllPosednessError(
            f"mode {k}: |data| * amplification = exp({log_mag[bad[0]]:.1f}) overflows; "
            "data incompatible with the truncation or noise level",
            mode=k,
        )


def _cutoff_mask(amp: np.ndarray, cutoff: float | None) -> np.ndarray:
    if cutoff is None:
        return np.ones(amp.shape, dtype=bool)
    if not cutoff > 0:
        raise DomainError("amplification cutoff must be positive")
    return amp <= cutoff


def _check_pair(basis: BesselBasis, *fields: SpectralField) -> int:
    sizes = {f.basis_size for f in fields}
    if len(sizes) != 1 or next(iter(sizes)) > basis.size:
        raise BasisMismatchError("data fields must share one size not exceeding the basis")
    return sizes.pop()


def _residual(solution: list[ModeTrajectory], f: SpectralField, basis, T: float) -> float:
    x = np.linspace(0.0, 1.0, RESIDUAL_NODES)
    at_T = SpectralField([m(T) for m in solution])
    diff = synthesize(at_T, basis, x).values - synthesize(f, basis, x).values
    return float(np.max(np.abs(diff)))


def invert_initial(
    f: SpectralField, frac: FracOrder, basis: BesselBasis, cutoff: float | None = None
) -> ReconstructionReport:
    """Recover the initial state from the final observation ``f``."""
    K = _check_pair(basis, f)
    sub = basis.truncate(K)
    amp = amplification_profile(frac, sub, Problem.INITIAL)
    kept = _cutoff_mask(amp, cutoff)
    _guard(f.coeffs, amp, kept)
    g = np.where(kept, f.coeffs * amp, 0.0)
    recovered = SpectralField(g)
    solution = mode_trajectories(recovered, frac, sub)
    residual = _residual(solution, f, sub, frac.horizon)
    return ReconstructionReport(
        problem=Problem.INITIAL,
        solution=solution,
        amplification=amp,
        truncation=K,
        residual=residual,
        recovered_initial=recovered,
        dropped_modes=[int(i) + 1 for i in np.nonzero(~kept)[0]],
        tolerances={"residual_nodes": RESIDUAL_NODES, "overflow_limit": _OVERFLOW},
    )


def invert_source(
    g: SpectralField,
    f: SpectralField,
    frac: FracOrder,
    basis: BesselBasis,
    cutoff: float | None = None,
) -> ReconstructionReport:
    """Recover the stationary source from the initial state ``g`` and final state ``f``."""
    K = _check_pair(basis, g, f)
    sub = basis.truncate(K)
    lam2 = sub.zeros**2
    amp = amplification_profile(frac, sub, Problem.SOURCE)
    kept = _cutoff_mask(amp, cutoff)
    diff = g.coeffs - f.coeffs
    _guard(diff, amp, kept)
    e = _final_propagators(frac, sub, K)
    C = diff / (1.0 - e)
    h = np.where(kept, lam2 * (g.coeffs - C), 0.0)
    recovered = SpectralField(h)
    solution = mode_trajectories(g, frac, sub, recovered)
    residual = _residual(solution, f, sub, frac.horizon)
    return ReconstructionReport(
        problem=Problem.SOURCE,
        solution=solution,
        amplification=amp,
        truncation=K,
        residual=residual,
        recovered_source=recovered,
        dropped_modes=[int(i) + 1 for i in np.nonzero(~kept)[0]],
        tolerances={"residual_nodes": RESIDUAL_NODES, "overflow_limit": _OVERFLOW},
    )


def add_noise(f, level: float, seed: int):
    """Uniform pseudo-random perturbation with sup-norm at most ``level * ||f||_inf``.

    Works on :class:`SpectralField` (perturbs coefficients) and
    :class:`GridFunction` (perturbs values); returns the same type.
    """
    if not level >= 0:
        raise DomainError("noise level must be non-negative")
    values = f.coeffs if isinstance(f, SpectralField) else f.values
    if level == 0:
        return f
    rng = np.random.default_rng(seed)
    scale = level * float(np.max(np.abs(values)))
    noisy = values + scale * rng.uniform(-1.0, 1.0, size=values.shape)
    if isinstance(f, SpectralField):
        return SpectralField(noisy)
    return GridFunction(f.nodes, noisy)
