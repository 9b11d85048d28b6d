import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.linalg import expm, solve_continuous_lyapunov

from optomech.covariance import (
    CouplingSchedule,
    integrate_covariance,
    is_stable,
    monodromy,
    periodic_steady_state,
    physicality,
    relaxed_steady_state,
)
from optomech.errors import Diverged, Unphysical, Unstable
from optomech.model import (
    EffectiveCouplingSpec,
    SystemParams,
    diffusion_matrix,
    drift_matrix,
    thermal_covariance,
)


def constant(g0, Omega=1.0, delta=1.0):
    return CouplingSchedule(Omega, {0: g0}, {0: delta})


def sideband(g0, g_mod, Omega, delta=1.0):
    return CouplingSchedule.from_effective_coupling(
        EffectiveCouplingSpec.single_sideband(g0, g_mod, Omega, delta)
    )


def test_schedule_values():
    s = sideband(0.6, 0.1, 1.4)
    g, d = s(np.array([0.0, 1.0]))
    np.testing.assert_allclose(g, [0.7, 0.6 + 0.1 * np.exp(-1.4j)])
    np.testing.assert_allclose(d, [1.0, 1.0])
    assert s.period == pytest.approx(2 * math.pi / 1.4)
    grid = s.drift_grid(SystemParams(0.2, 1e-6), 8)
    assert grid.shape == (16, 4, 4)
    np.testing.assert_array_equal(grid[3], s.drift(3 * s.period / 16, SystemParams(0.2, 1e-6)))


def test_schedule_from_fourier_maps_moments():
    p = SystemParams(kappa=0.2, gamma_m=1e-6, delta=1.0, g=4e-6)
    s = CouplingSchedule.from_fourier(1.4, {0: 1e4, 1: 5.0, -1: 5.0}, {0: 3e4, -1: 1e3j}, p)
    assert s.g_harmonics == {0: pytest.approx(math.sqrt(2) * 4e-6 * 3e4), -1: pytest.approx(math.sqrt(2) * 4e-6 * 1e3j)}
    assert s.delta_harmonics[0] == pytest.approx(1 - 4e-6 * 1e4)
    with pytest.raises(ValueError):
        CouplingSchedule(0.0, {}, {})


def test_uncoupled_thermal_state_is_stationary():
    p = SystemParams(kappa=0.2, gamma_m=1e-6, n_m=2000, n_a=0.3)
    V0 = thermal_covariance(p)
    np.testing.assert_allclose(np.diag(V0), [2000.5, 2000.5, 0.8, 0.8])
    out = integrate_covariance(constant(0.0), p, V0, t_end=50.0, stride=512)
    np.testing.assert_allclose(out.V, np.broadcast_to(V0, out.V.shape), rtol=1e-12)


def test_uncoupled_cavity_relaxes_to_thermal():
    p = SystemParams(kappa=0.2, gamma_m=1e-6, n_a=0.3)
    V0 = np.diag([0.5, 0.5, 5.0, 5.0])
    out = integrate_covariance(constant(0.0), p, V0, t_end=200.0, stride=4096)
    t = out.times
    np.testing.assert_allclose(out.V[:, 2, 2], 0.8 + (5.0 - 0.8) * np.exp(-0.4 * t), rtol=1e-9)
    np.testing.assert_allclose(out.V[-1], thermal_covariance(p), atol=1e-12)


def test_noiseless_flow_is_congruence_by_propagator():
    p = SystemParams(kappa=0.0, gamma_m=0.0)
    A = drift_matrix(0.2, 1.0, p)
    V0 = np.diag([1.0, 2.0, 3.0, 4.0])
    out = integrate_covariance(constant(0.2), p, V0, t_end=2 * math.pi, check_physical=False)
    phi = expm(A * 2 * math.pi)
    np.testing.assert_allclose(out.V[-1], phi @ V0 @ phi.T, rtol=1e-9)


def test_against_general_purpose_integrator(prescribed_params):
    s = sideband(0.6, 0.1, 1.4)
    D = diffusion_matrix(prescribed_params)
    V0 = thermal_covariance(prescribed_params)

    def rhs(t, y):
        A = s.drift(t, prescribed_params)
        V = y.reshape(4, 4)
        return (A @ V + V @ A.T + D).ravel()

    ref = solve_ivp(rhs, (0, 10 * s.period), V0.ravel(), method="DOP853", rtol=1e-12, atol=1e-12)
    out = integrate_covariance(s, prescribed_params, V0, t_end=10 * s.period)
    np.testing.assert_allclose(out.V[-1], ref.y[:, -1].reshape(4, 4), rtol=1e-9, atol=1e-10)


def test_divergence_is_reported():
    p = SystemParams(kappa=0.2, gamma_m=1e-6)
    with pytest.raises(Diverged) as info:
        integrate_covariance(constant(1.5), p, thermal_covariance(p), t_end=2000.0, check_physical=False)
    assert 0 < info.value.time < 2000


def test_unphysical_initial_state_rejected():
    p = SystemParams(kappa=0.2, gamma_m=1e-6)
    with pytest.raises(Unphysical):
        integrate_covariance(constant(0.0), p, 0.1 * np.eye(4), t_end=1.0)


@pytest.mark.parametrize("kappa,gamma,Omega", [(0.2, 1e-6, 1.4), (0.02, 3e-6, 1.3), (0.5, 0.3, 2.0)])
def test_uncoupled_spectral_radius(kappa, gamma, Omega):
    tau = 2 * math.pi / Omega
    phi = monodromy(constant(0.0, Omega), SystemParams(kappa=kappa, gamma_m=gamma))
    assert phi.spectral_radius == pytest.approx(max(math.exp(-kappa * tau), math.exp(-gamma * tau / 2)), rel=1e-9)


def test_lossless_spectral_radius_is_one():
    phi = monodromy(constant(0.0, 1.4), SystemParams(kappa=0.0, gamma_m=0.0))
    assert phi.spectral_radius == pytest.approx(1.0, abs=1e-9)
    stable, margin = is_stable(phi)
    assert not stable and abs(margin) < 1e-9


def test_constant_coupling_monodromy_is_matrix_exponential(prescribed_params):
    phi = monodromy(constant(0.2, 1.4), prescribed_params)
    ref = expm(drift_matrix(0.2, 1.0, prescribed_params) * 2 * math.pi / 1.4)
    np.testing.assert_allclose(phi.phi, ref, atol=1e-8)


@settings(max_examples=10, deadline=None)
@given(st.floats(0, 0.8), st.floats(0, 0.4), st.floats(1.0, 3.0), st.floats(0.01, 0.5), st.floats(0, 0.1))
def test_liouville_determinant(g0, g_mod, Omega, kappa, gamma):
    p = SystemParams(kappa=kappa, gamma_m=gamma)
    phi = monodromy(sideband(g0, g_mod, Omega), p, steps_per_period=1024)
    tau = 2 * math.pi / Omega
    assert np.linalg.det(phi.phi) == pytest.approx(math.exp(-(gamma + 2 * kappa) * tau), rel=1e-9)


def test_constant_coupling_steady_state_matches_lyapunov_solver(prescribed_params):
    p = SystemParams(kappa=0.2, gamma_m=1e-6, n_m=10.0, n_a=0.1)
    steady = periodic_steady_state(constant(0.2, 1.4), p)
    A = drift_matrix(0.2, 1.0, p)
    ref = solve_continuous_lyapunov(A, -diffusion_matrix(p))
    for V in steady.V[::32]:
        np.testing.assert_allclose(V, ref, rtol=1e-7, atol=1e-10)


def test_uncoupled_steady_state_is_thermal():
    p = SystemParams(kappa=0.2, gamma_m=1e-6, n_m=2000, n_a=0.0)
    steady = periodic_steady_state(constant(0.0, 1.4), p)
    np.testing.assert_allclose(steady.V, np.broadcast_to(thermal_covariance(p), steady.V.shape), rtol=1e-10)


@pytest.fixture(scope="module")
def modulated_steady():
    p = SystemParams(kappa=0.2, gamma_m=1e-6)
    return periodic_steady_state(sideband(0.6, 0.1, 1.4), p)


def test_steady_state_is_periodic_and_symmetric(modulated_steady):
    assert modulated_steady.V.shape == (256, 4, 4)
    assert modulated_steady.periodicity_error < 1e-10
    np.testing.assert_array_equal(modulated_steady.V, np.swapaxes(modulated_steady.V, 1, 2))
    assert physicality(modulated_steady.V).min() >= -1e-8
    # genuinely time dependent
    assert np.ptp(modulated_steady.V[:, 0, 0]) > 1e-3


def test_steady_state_matches_relaxation(modulated_steady):
    p = modulated_steady.params
    relaxed = relaxed_steady_state(modulated_steady.schedule, p)
    np.testing.assert_allclose(relaxed.V, modulated_steady.V, rtol=1e-8)


def test_resample_matches_stored_samples(modulated_steady):
    s = modulated_steady
    t, V = s.resample(s.times[10], s.times[12], 9)
    np.testing.assert_allclose(t[[0, -1]], s.times[[10, 12]])
    np.testing.assert_allclose(V[0], s.V[10], rtol=1e-12)
    np.testing.assert_allclose(V[-1], s.V[12], rtol=1e-10)
    # wrapping past the end of the period
    t, V = s.resample(s.times[-1], s.times[-1] + 2 * (s.times[1] - s.times[0]), 5)
    np.testing.assert_allclose(V[-1], s.V[1], rtol=1e-10)


def test_unstable_modulation_raises():
    with pytest.raises(Unstable):
        periodic_steady_state(constant(1.5, 1.4), SystemParams(kappa=0.2, gamma_m=1e-6))


def test_steady_state_monotone_in_thermal_noise():
    s = sideband(0.4, 0.1, 1.6)
    cold = periodic_steady_state(s, SystemParams(kappa=0.2, gamma_m=1e-3, n_m=0.0))
    hot = periodic_steady_state(s, SystemParams(kappa=0.2, gamma_m=1e-3, n_m=50.0))
    gap = np.linalg.eigvalsh(hot.V - cold.V)
    assert gap.min() >= -1e-9


def test_physicality_examples():
    assert physicality(0.5 * np.eye(4)) == pytest.approx(0.0, abs=1e-15)
    assert physicality(np.eye(4)) == pytest.approx(0.5)
    assert physicality(np.diag([0.25, 0.25, 0.5, 0.5])) < 0
