import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optomech.classical import compute_limit_cycle
from optomech.errors import FrequencyMismatch, RealityViolation, ResonantDenominator
from optomech.model import DriveSpec, SystemParams
from optomech.perturbative import (
    PerturbativeSolution,
    compare_with_numerical,
    evaluate,
    perturbative_coefficients,
)

OPTICAL_DRIVE = DriveSpec.two_tone(7e4, 2.5e4, 1.4)
MICROWAVE_DRIVE = DriveSpec.two_tone(9e3, 1.3e3, 1.3)


def test_zeroth_order(optical_params):
    sol = perturbative_coefficients(optical_params, OPTICAL_DRIVE)
    assert sol.coefficient("a", 0, 0) == pytest.approx(7e4 / (0.2 + 1j))
    assert sol.coefficient("a", -1, 0) == pytest.approx(2.5e4 / (0.2 + 1j * (1 - 1.4)))
    assert sol.coefficient("a", 1, 0) == 0
    assert np.all(sol.q[0] == 0) and np.all(sol.p[0] == 0)


def test_first_order_static_displacement():
    p = SystemParams(kappa=0.2, gamma_m=1e-6, delta=1.0, g=4e-6)
    sol = perturbative_coefficients(p, DriveSpec(Omega=1.4, harmonics={0: 7e4}))
    assert sol.coefficient("q", 0, 1) == pytest.approx(7e4**2 / (0.2**2 + 1.0))
    assert sol.coefficient("q", 1, 1) == 0


def test_first_order_beat_note(optical_params):
    sol = perturbative_coefficients(optical_params, OPTICAL_DRIVE)
    a0, am = sol.coefficient("a", 0, 0), sol.coefficient("a", -1, 0)
    # the two tones beat at -Omega in |a|^2
    L = 1 - 1.4**2 - 1j * 1e-6 * 1.4
    assert sol.coefficient("q", -1, 1) == pytest.approx(np.conj(a0) * am / L)
    assert sol.coefficient("p", -1, 1) == pytest.approx(-1.4j * sol.coefficient("q", -1, 1))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 10))
def test_drive_homogeneity(lam):
    p = SystemParams(kappa=0.2, gamma_m=1e-6, delta=1.0, g=4e-6)
    base = perturbative_coefficients(p, OPTICAL_DRIVE)
    scaled = perturbative_coefficients(p, DriveSpec.two_tone(7e4 * lam, 2.5e4 * lam, 1.4))
    for j in range(base.j_max + 1):
        # every order carries j + 1 powers of the drive amplitude
        np.testing.assert_allclose(scaled.a[j], lam ** (j + 1) * base.a[j], rtol=1e-10, atol=0)
        np.testing.assert_allclose(scaled.q[j], lam ** (j + 1) * base.q[j], rtol=1e-10, atol=0)


def test_order_parity(optical_params):
    sol = perturbative_coefficients(optical_params, OPTICAL_DRIVE, j_max=5)
    assert np.all(sol.a[1::2] == 0)
    assert np.all(sol.q[0::2] == 0)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(0.3, 3.0).filter(lambda x: abs(x - 1) > 0.05 and abs(x - 0.5) > 0.05),
    st.floats(0, 1e4),
    st.floats(0, 1e4),
)
def test_reality(Omega, e0, e1):
    p = SystemParams(kappa=0.2, gamma_m=1e-3, delta=1.0, g=4e-6)
    sol = perturbative_coefficients(p, DriveSpec.two_tone(e0, e1, Omega), j_max=4)
    for j in range(5):
        np.testing.assert_allclose(sol.q[j], np.conj(sol.q[j][::-1]), rtol=1e-12, atol=1e-12 * (1 + abs(sol.q[j]).max()))
        np.testing.assert_allclose(sol.p[j], 1j * np.arange(-2, 3) * Omega * sol.q[j])


def test_higher_orders_converge(microwave_params):
    cycle = compute_limit_cycle(microwave_params, MICROWAVE_DRIVE)
    errors = [compare_with_numerical(perturbative_coefficients(microwave_params, MICROWAVE_DRIVE, j_max=j), cycle)
              for j in (1, 3, 6)]
    assert errors[0] > errors[1] > errors[2]
    assert errors[1] <= 0.05


def test_uncoupled_series_is_exact():
    p = SystemParams(kappa=0.2, gamma_m=1e-6, delta=1.0, g=0.0)
    sol = perturbative_coefficients(p, OPTICAL_DRIVE)
    cycle = compute_limit_cycle(p, OPTICAL_DRIVE)
    assert compare_with_numerical(sol, cycle) < 1e-6


def test_evaluate_scalar_and_array(optical_params):
    sol = perturbative_coefficients(optical_params, OPTICAL_DRIVE)
    s = evaluate(sol, 0.3)
    arr = evaluate(sol, np.array([0.3, 0.3 + sol.period]))
    assert isinstance(s.q, float)
    assert arr.q[0] == pytest.approx(s.q)
    assert arr.a[1] == pytest.approx(s.a, rel=1e-12)


def test_resonant_denominators():
    drive = DriveSpec.two_tone(1.0, 1.0, 1.0)
    with pytest.raises(ResonantDenominator):
        perturbative_coefficients(SystemParams(kappa=0.2, gamma_m=0.0, g=1e-3), drive)
    with pytest.raises(ResonantDenominator):
        perturbative_coefficients(SystemParams(kappa=0.0, gamma_m=1e-3, delta=0.0, g=1e-3), drive)


def test_argument_checks(optical_params):
    with pytest.raises(ValueError):
        perturbative_coefficients(optical_params, OPTICAL_DRIVE, j_max=-1)
    with pytest.raises(ValueError):
        perturbative_coefficients(optical_params, DriveSpec(Omega=1.4, harmonics={3: 1.0}), n_max=2)


def test_reality_violation_detected():
    q = np.zeros((1, 3), dtype=complex)
    q[0, 2] = 1.0  # positive harmonic without its conjugate partner
    sol = PerturbativeSolution(1.0, 0, 1, 0.0, q, np.zeros_like(q), np.zeros_like(q))
    with pytest.raises(RealityViolation):
        evaluate(sol, np.linspace(0, 2 * math.pi, 16))


def test_frequency_mismatch(microwave_params):
    sol = perturbative_coefficients(microwave_params, MICROWAVE_DRIVE)
    cycle = compute_limit_cycle(microwave_params, DriveSpec.two_tone(9e3, 1.3e3, 1.31))
    with pytest.raises(FrequencyMismatch):
        compare_with_numerical(sol, cycle)
