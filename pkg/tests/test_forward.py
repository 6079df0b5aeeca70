import math

import numpy as np
import pytest

from besselfrac import oracle
from besselfrac.basis import SpectralField, analyze, synthesize
from besselfrac.errors import BasisMismatchError, DomainError
from besselfrac.forward import (
    ModeTrajectory,
    Propagator,
    mode_trajectories,
    propagate,
    solve_forward_homogeneous,
    solve_forward_with_source,
)
from besselfrac.funcs import poly43, poly44
from besselfrac.specfun import FracOrder, ml

FRAC = FracOrder(0.5, 1.0)


def test_t_zero_returns_initial_bitwise(basis40, grid101):
    g = analyze(poly43, basis40)
    u = solve_forward_homogeneous(g, FRAC, basis40, 0.0, grid101)
    assert u.values.tobytes() == synthesize(g, basis40, grid101).values.tobytes()


def test_classical_heat_limit(basis20, grid101):
    # alpha = 1 lies outside FracOrder; exercise the trajectory machinery directly
    lam = basis20.zeros[0]
    traj = ModeTrajectory(1, lam, 1.0, 0.0, 1.0)
    u = synthesize(SpectralField([traj(0.1)]), basis20, grid101).values
    exact = math.exp(-(lam**2) * 0.1) * np.array([float(v) for v in synthesize(SpectralField.unit(1, 1), basis20, grid101).values])
    assert np.max(np.abs(u - exact)) <= 1e-9


def _l1_field(g, h, basis, dt=2.5e-4, T=1.0, alpha=0.5):
    n = int(round(T / dt))
    U = oracle.l1_time_stepper(g.coeffs, alpha, basis.zeros[: g.basis_size], dt, n, h=0.0 if h is None else h.coeffs)
    return SpectralField(U[-1])


def test_homogeneous_against_l1_oracle(basis50):
    x = np.linspace(0, 1, 51)
    g = analyze(poly43, basis50)
    spectral = solve_forward_homogeneous(g, FRAC, basis50, 1.0, x).values
    stepped = synthesize(_l1_field(g, None, basis50), basis50, x).values
    assert np.max(np.abs(spectral - stepped)) <= 5e-3


def test_source_against_l1_oracle(basis50):
    x = np.linspace(0, 1, 51)
    g = analyze(poly43, basis50)
    h = analyze(poly44, basis50)
    spectral = solve_forward_with_source(g, h, FRAC, basis50, 1.0, x).values
    stepped = synthesize(_l1_field(g, h, basis50), basis50, x).values
    assert np.max(np.abs(spectral - stepped)) <= 5e-3


@pytest.mark.parametrize("t", [0.0, 0.3, 1.0])
def test_zero_source_is_bitwise_homogeneous(basis40, grid101, t):
    g = analyze(poly43, basis40)
    a = solve_forward_homogeneous(g, FRAC, basis40, t, grid101)
    b = solve_forward_with_source(g, SpectralField.zeros(40), FRAC, basis40, t, grid101)
    assert a.values.tobytes() == b.values.tobytes()


@pytest.mark.parametrize("t", [0.0, 0.25, 1.0])
def test_steady_state(basis40, grid101, t):
    h = analyze(poly44, basis40)
    g = SpectralField(h.coeffs / basis40.zeros**2)
    u = solve_forward_with_source(g, h, FRAC, basis40, t, grid101)
    np.testing.assert_array_equal(u.values, synthesize(g, basis40, grid101).values)


def test_source_initial_condition(basis40, grid101):
    g = analyze(poly43, basis40)
    h = analyze(poly44, basis40)
    u = solve_forward_with_source(g, h, FRAC, basis40, 0.0, grid101)
    np.testing.assert_allclose(u.values, synthesize(g, basis40, grid101).values, atol=1e-15)


def _caputo_residual(lam, dt, alpha=0.5, t_min=0.1):
    n = int(round(1.0 / dt))
    t = np.arange(n + 1) * dt
    traj = ModeTrajectory(1, lam, 1.0, 0.0, alpha)
    u = np.array([traj(s) for s in t])
    r = oracle.caputo_l1(u, alpha, dt) + lam**2 * u
    return np.max(np.abs(r[t >= t_min]))


@pytest.mark.parametrize("k", [1, 2, 3])
def test_caputo_residual_order(basis20, k):
    lam = basis20.zeros[k - 1]
    e1 = _caputo_residual(lam, 2e-4)
    e2 = _caputo_residual(lam, 1e-4)
    assert e1 / e2 >= 2 ** (2 - 0.5) * 0.8


@pytest.mark.parametrize("k", [1, 5, 20])
def test_mode_decay_is_monotone(basis20, k):
    g = SpectralField.unit(k, 20) * -3.0
    traj = mode_trajectories(g, FRAC, basis20)[k - 1]
    vals = np.abs(traj.sample(np.linspace(0, 1, 100)))
    assert np.all(np.diff(vals) <= 0)


def test_mode_trajectory_invariants(basis20):
    g = analyze(poly43, basis20)
    h = analyze(poly44, basis20)
    times = np.linspace(0, 1, 50)
    for m in mode_trajectories(g, FRAC, basis20, h):
        assert m(0.0) == pytest.approx(g.coeffs[m.k - 1], abs=1e-18)
        bound = max(abs(m(0.0)), abs(h.coeffs[m.k - 1]) / m.lam**2) + abs(m.amplitude)
        assert np.all(np.abs(m.sample(times)) <= bound + 1e-18)
    for m in mode_trajectories(g, FRAC, basis20):
        assert m(0.0) == g.coeffs[m.k - 1]
        assert m(0.6) == g.coeffs[m.k - 1] * ml(0.5, -(m.lam**2) * 0.6**0.5)


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0])
def test_boundary_condition(basis40, t):
    g = analyze(poly43, basis40)
    h = analyze(poly44, basis40)
    c = propagate(g, FRAC, basis40, t, h)
    u1 = solve_forward_with_source(g, h, FRAC, basis40, t, [1.0]).values[0]
    assert abs(u1) <= 1e-9 * np.sum(np.abs(c.coeffs))


def test_memoized_propagator_matches(basis20):
    g = analyze(poly43, basis20)
    a = propagate(g, FRAC, basis20, 0.7)
    b = propagate(g, FRAC, basis20, 0.7, memoize=True)
    assert a.coeffs.tobytes() == b.coeffs.tobytes()
    p = Propagator(0.5, memoize=True)
    p(2.0, 0.3)
    p(2.0, 0.3)
    assert p._cached.cache_info().hits == 1


def test_horizon_consistency(basis40, grid101):
    g = analyze(poly43, basis40)
    u = solve_forward_homogeneous(g, FRAC, basis40, FRAC.horizon, grid101)
    f = propagate(g, FRAC, basis40, FRAC.horizon)
    assert u.values.tobytes() == synthesize(f, basis40, grid101).values.tobytes()


def test_forward_errors(basis20, grid101):
    g = SpectralField.unit(1, 20)
    with pytest.raises(DomainError):
        solve_forward_homogeneous(g, FRAC, basis20, 1.5, grid101)
    with pytest.raises(DomainError):
        solve_forward_homogeneous(g, FRAC, basis20, -0.1, grid101)
    with pytest.raises(BasisMismatchError):
        solve_forward_with_source(g, SpectralField.zeros(19), FRAC, basis20, 0.5, grid101)
    with pytest.raises(BasisMismatchError):
        solve_forward_homogeneous(SpectralField.zeros(21), FRAC, basis20, 0.5, grid101)
