"""Fourier-Bessel spectral solvers for the time-fractional diffusion equation
with Bessel operator on the unit radius, and its inverse-initial and
inverse-source problems.

>>> from besselfrac import compute_zeros, analyze, FracOrder, propagate, invert_initial
>>> basis = compute_zeros(40)
>>> g = analyze(lambda x: x**4 * (1 - x)**3, basis)
>>> frac = FracOrder(alpha=0.5, horizon=1.0)
>>> f = propagate(g, frac, basis, t=1.0)
>>> report = invert_initial(f, frac, basis)
"""

__version__ = "0.1.0"

from .basis import (
    BesselBasis,
    GridFunction,
    Quadrature,
    SpectralField,
    analyze,
    compute_zeros,
    decay_exponent,
    gauss_legendre,
    synthesize,
    synthesize_first_derivative,
    synthesize_second_derivative,
    weighted_l2_norm,
)
from .errors import (
    BasisMismatchError,
    ConvergenceError,
    DegenerateDecayError,
    DomainError,
    IllPosednessError,
    PoleError,
)
from .forward import (
    ModeTrajectory,
    mode_trajectories,
    propagate,
    solve_forward_homogeneous,
    solve_forward_with_source,
)
from .inverse import (
    ReconstructionReport,
    add_noise,
    amplification_profile,
    invert_initial,
    invert_source,
)
from .specfun import FracOrder, MLValue, bessel_j, gamma, mittag_leffler
