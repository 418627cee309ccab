import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from cvdyn.errors import ConfigurationError, ContractError, DomainError
from cvdyn.gaussian import min_symplectic_eigenvalue
from cvdyn.propagator import (
    MemoryKernels,
    PropagationMode,
    TimeGrid,
    evolve_covariance,
    evolve_mean,
    initial_twb,
    kernels_on_grid,
    rotation,
)
from cvdyn.reservoir import CouplingParams, SpectralKind, SpectralModel, coeff_analytic

ZT = SpectralModel(SpectralKind.ZERO_T, 0.1)
HT = SpectralModel(SpectralKind.HIGH_T, 0.1, 200.0)
J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def test_initial_twb_examples():
    np.testing.assert_array_equal(initial_twb(0.0), 0.5 * np.eye(4))
    s = initial_twb(1.0)
    assert s[0, 0] == pytest.approx(1.8811, abs=1e-4)
    assert s[0, 2] == pytest.approx(1.8134, abs=1e-4)
    assert s[1, 3] == pytest.approx(-1.8134, abs=1e-4)
    with pytest.raises(DomainError):
        initial_twb(-0.1)


@given(st.floats(min_value=0.0, max_value=3.0))
def test_initial_twb_is_pure(r):
    s = initial_twb(r)
    assert np.linalg.det(s) == pytest.approx(1 / 16, rel=1e-9)
    assert min_symplectic_eigenvalue(s) == pytest.approx(0.5, abs=1e-10)


def test_evolve_mean():
    x = np.array([1.0, -2.0, 0.5, 3.0])
    np.testing.assert_array_equal(evolve_mean(np.zeros(4), 1.3, 2.0, 5.0), np.zeros(4))
    np.testing.assert_allclose(evolve_mean(x, 0.0, 0.0, 5.0), x)
    np.testing.assert_array_equal(evolve_mean(x, math.inf, 1.0, 5.0), np.zeros(4))
    # damped rotation preserves the direction structure: norm shrinks by e^{-Gamma/2}
    out = evolve_mean(x, 0.4, 0.7, 5.0)
    assert np.linalg.norm(out) == pytest.approx(math.exp(-0.2) * np.linalg.norm(x))


def test_zero_kernels_are_identity():
    for r in (0.0, 0.3, 2.0):
        s0 = initial_twb(r)
        for mode in PropagationMode:
            out = evolve_covariance(s0, MemoryKernels.zeros(), 5.0, mode)
            assert np.max(np.abs(out - s0)) <= 1e-12


def test_kernels_vanish_at_t0():
    k = kernels_on_grid(ZT, CouplingParams(0.1, 5.0), TimeGrid(2.0, 400))
    snap = k[0]
    for name in ("Gamma", "DeltaGamma", "DeltaCo", "DeltaSi", "PiCo", "PiSi"):
        assert getattr(snap, name) == 0.0


def test_gamma_derivative_is_twice_damping():
    p = CouplingParams(0.1, 5.0)
    grid = TimeGrid(20.0, 8000)
    k = kernels_on_grid(ZT, p, grid)
    idx = np.linspace(50, 7950, 20).astype(int)
    fd = (k.Gamma[idx + 1] - k.Gamma[idx - 1]) / (2 * grid.dt)
    g = coeff_analytic(ZT, p, k.t[idx]).gamma
    np.testing.assert_allclose(fd, 2 * g, atol=1e-4)


def test_delta_gamma_stationary_value():
    # Delta_Gamma -> Delta_inf / (2 gamma_inf) = 1/2 since both limits equal pi a^2 / (2 D)
    k = kernels_on_grid(ZT, CouplingParams(0.1, 5.0), TimeGrid(9000.0, 180000))
    i = int(np.argmax(k.Gamma >= 10))
    assert k.DeltaGamma[i] == pytest.approx(0.5, abs=1e-3)


def _moment_oracle(model, p, r, t_eval):
    """Integrate the single-mode second-moment equations directly."""

    def rhs(t, y):
        c = coeff_analytic(model, p, t)
        V = y[:4].reshape(2, 2)
        C = y[4:].reshape(2, 2)
        D = np.array([[0.0, c.pi], [c.pi, 2.0 * c.delta]])
        dV = p.omega0 * (J @ V + V @ J.T) - 2.0 * c.gamma * V + D
        dC = p.omega0 * (J @ C + C @ J.T) - 2.0 * c.gamma * C
        return np.concatenate([dV.ravel(), dC.ravel()])

    s0 = initial_twb(r)
    y0 = np.concatenate([s0[:2, :2].ravel(), s0[:2, 2:].ravel()])
    sol = solve_ivp(rhs, (0.0, t_eval[-1]), y0, t_eval=t_eval, rtol=1e-11, atol=1e-13, method="DOP853")
    return sol.y[:4].T.reshape(-1, 2, 2), sol.y[4:].T.reshape(-1, 2, 2)


@pytest.mark.parametrize("model,w0", [(ZT, 5.0), (HT, 10.0), (HT, 0.15)])
def test_exact_covariance_matches_moment_equations(model, w0):
    p = CouplingParams(0.1, w0)
    grid = TimeGrid(4.0, 8000)
    k = kernels_on_grid(model, p, grid)
    sig = evolve_covariance(initial_twb(1.0), k, w0)
    sel = slice(None, None, 400)
    A_ref, C_ref = _moment_oracle(model, p, 1.0, grid.times[sel])
    scale = max(1.0, float(np.max(np.abs(A_ref))))
    assert np.max(np.abs(sig[sel, :2, :2] - A_ref)) <= 1e-6 * scale
    assert np.max(np.abs(sig[sel, :2, 2:] - C_ref)) <= 1e-6 * scale


def test_trace_identity():
    r = 0.7
    k = kernels_on_grid(ZT, CouplingParams(0.1, 5.0), TimeGrid(30.0, 6000))
    sig = evolve_covariance(initial_twb(r), k, 5.0)
    tr = np.trace(sig[:, :2, :2], axis1=-2, axis2=-1)
    np.testing.assert_allclose(tr, math.cosh(2 * r) * np.exp(-k.Gamma) + 2 * k.DeltaGamma, atol=1e-13)


@pytest.mark.parametrize("model,w0", [(ZT, 5.0), (HT, 10.0)])
def test_symmetry_and_secular_bound(model, w0):
    k = kernels_on_grid(model, CouplingParams(0.1, w0), TimeGrid(5.0, 4000))
    s0 = initial_twb(1.5)
    ex = evolve_covariance(s0, k, w0, PropagationMode.EXACT)
    se = evolve_covariance(s0, k, w0, PropagationMode.SECULAR)
    for sig in (ex, se):
        assert np.max(np.abs(sig - np.swapaxes(sig, -1, -2))) <= 1e-14
        assert np.max(np.abs(sig[:, :2, :2] - sig[:, 2:, 2:])) <= 1e-14
    bound = 2 * (np.abs(k.DeltaCo) + np.abs(k.DeltaSi) + np.abs(k.PiCo) + np.abs(k.PiSi))
    diff = np.abs(ex[:, :2, :2] - se[:, :2, :2])
    assert np.all(diff <= bound[:, None, None] + 1e-15)


def test_secular_mode_kernels():
    k = kernels_on_grid(HT, CouplingParams(0.1, 10.0), TimeGrid(2.0, 2000), PropagationMode.SECULAR)
    assert not np.any(k.DeltaCo) and not np.any(k.PiSi)
    full = kernels_on_grid(HT, CouplingParams(0.1, 10.0), TimeGrid(2.0, 2000))
    np.testing.assert_array_equal(k.Gamma, full.Gamma)
    np.testing.assert_array_equal(k.DeltaGamma, full.DeltaGamma)


def test_grid_must_resolve_fast_phase():
    with pytest.raises(ConfigurationError):
        kernels_on_grid(ZT, CouplingParams(0.1, 10.0), TimeGrid(50.0, 1000))
    TimeGrid(50.0, 1000).check_resolves(1.0)


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        TimeGrid(0.0, 10)
    with pytest.raises(ConfigurationError):
        TimeGrid(1.0, 1)
    g = TimeGrid(2.0, 4)
    np.testing.assert_allclose(g.times, [0, 0.5, 1.0, 1.5, 2.0])


def test_contract_errors():
    k = MemoryKernels.zeros()
    bad = initial_twb(1.0)
    bad[0, 1] = 0.3
    with pytest.raises(ContractError):
        evolve_covariance(bad, k, 1.0)
    asym = 0.5 * np.eye(4)
    asym[2, 2] = 0.7
    with pytest.raises(ContractError):
        evolve_covariance(asym, k, 1.0)


def test_grid_refinement_of_kernels():
    p = CouplingParams(0.1, 10.0)
    k1 = kernels_on_grid(HT, p, TimeGrid(5.0, 10000))
    k2 = kernels_on_grid(HT, p, TimeGrid(5.0, 20000))
    for name in ("Gamma", "DeltaGamma", "DeltaCo", "DeltaSi", "PiCo", "PiSi"):
        a, b = getattr(k1, name), getattr(k2, name)[::2]
        assert np.max(np.abs(a - b)) <= 1e-7 * max(1.0, np.max(np.abs(b)))


def test_rotation_shape():
    R = rotation(2.0, np.linspace(0, 1, 5))
    assert R.shape == (5, 2, 2)
    np.testing.assert_allclose(R @ np.swapaxes(R, -1, -2), np.broadcast_to(np.eye(2), (5, 2, 2)), atol=1e-15)
