"""Second moments: time-periodic Lyapunov dynamics and Floquet stability.

The covariance V of the fluctuations (dq, dp, dx, dy) obeys

    dV/dt = A(t) V + V A(t)^T + D

with A(t) periodic.  Everything here integrates on a uniform grid of
``steps_per_period`` classical RK4 steps per modulation period, so results
at fixed resolution are bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import Diverged, SolveFailed, Unphysical, Unstable
from .model import diffusion_matrix, drift_matrix, thermal_covariance

GUARD = 1e12
STEPS_PER_PERIOD = 4096
SAMPLES_PER_PERIOD = 256

SYMPLECTIC_FORM = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)


def _fourier_sum(harmonics, omega, t):
    total = np.zeros(np.shape(t), dtype=complex)
    for n, c in harmonics.items():
        total = total + c * np.exp(1j * n * omega * np.asarray(t))
    return total


class CouplingSchedule:
    """Periodic effective coupling g(t) and effective detuning Delta(t).

    Both are stored as finite Fourier series in the modulation frequency.
    The detuning is real; its harmonics must come in conjugate pairs and only
    the real part of the sum is used.
    """

    def __init__(self, Omega, g_harmonics, delta_harmonics):
        if not Omega > 0:
            raise ValueError(f"Omega must be positive, got {Omega}")
        self.Omega = float(Omega)
        self.g_harmonics = {int(n): complex(c) for n, c in g_harmonics.items()}
        self.delta_harmonics = {int(n): complex(c) for n, c in delta_harmonics.items()}

    @classmethod
    def from_effective_coupling(cls, spec):
        """Prescribed mode: g(t) given directly, constant detuning."""
        return cls(spec.Omega, spec.g_harmonics, {0: spec.delta_eff})

    @classmethod
    def from_fourier(cls, Omega, q_coeffs, a_coeffs, params):
        """Derived mode from first-moment harmonics ``{n: q_n}``, ``{n: a_n}``."""
        s2g = math.sqrt(2) * params.g
        g_h = {n: s2g * c for n, c in a_coeffs.items()}
        d_h = {n: -params.g * c for n, c in q_coeffs.items()}
        d_h[0] = d_h.get(0, 0.0) + params.delta
        return cls(Omega, g_h, d_h)

    @classmethod
    def from_limit_cycle(cls, cycle, params):
        return cls.from_fourier(cycle.Omega, cycle.q, cycle.a, params)

    @classmethod
    def from_perturbative(cls, sol, params):
        q, _, a = sol.summed_coefficients()
        return cls.from_fourier(sol.Omega, q, a, params)

    @property
    def period(self):
        return 2 * math.pi / self.Omega

    def __call__(self, t):
        g = _fourier_sum(self.g_harmonics, self.Omega, t)
        d = _fourier_sum(self.delta_harmonics, self.Omega, t).real
        return g, d

    def drift(self, t, params):
        g, d = self(t)
        return drift_matrix(g, d, params)

    def drift_grid(self, params, steps_per_period):
        """A(t) on the half-step grid of one period, shape (2m, 4, 4)."""
        h = self.period / steps_per_period
        t = 0.5 * h * np.arange(2 * steps_per_period)
        return np.ascontiguousarray(self.drift(t, params))


@dataclass(frozen=True)
class CovarianceSeries:
    times: np.ndarray
    V: np.ndarray


@dataclass(frozen=True)
class MonodromyMatrix:
    phi: np.ndarray
    spectral_radius: float
    period: float


@dataclass
class PeriodicCovariance:
    """Periodic steady-state covariance sampled over one period.

    ``times`` lie in [0, period); ``V[k]`` is the covariance at ``times[k]``
    (mod period).
    """

    times: np.ndarray
    V: np.ndarray
    period: float
    schedule: CouplingSchedule
    params: object
    steps_per_period: int
    periodicity_error: float = 0.0

    def resample(self, t_start, t_stop, num):
        """Covariance on ``num`` equally spaced points in [t_start, t_stop].

        Integrates from the stored sample at or before ``t_start``; times are
        snapped to the integration grid.
        """
        m = self.steps_per_period
        h = self.period / m
        stride_samples = m // len(self.times)
        k0 = int(math.floor(t_start / h + 1e-9))
        k1 = int(math.ceil(t_stop / h - 1e-9))
        span = max(k1 - k0, 1)
        stride = max(span // (num - 1), 1)
        base = (k0 // stride_samples) % len(self.times)
        lead = k0 - (k0 // stride_samples) * stride_samples
        a_grid = self.schedule.drift_grid(self.params, m)
        diff = diffusion_matrix(self.params)
        start = (2 * (k0 - lead)) % (2 * m)
        v0 = np.ascontiguousarray(self.V[base])
        if lead:
            seg, _ = _kernels.lyapunov_rk4(a_grid, diff, h, v0, lead, lead, start, GUARD)
            v0 = np.ascontiguousarray(seg[-1])
        seg, _ = _kernels.lyapunov_rk4(
            a_grid, diff, h, v0, stride * (num - 1), stride, (2 * k0) % (2 * m), GUARD
        )
        times = (k0 + stride * np.arange(num)) * h
        return times, seg


def physicality(V):
    """Smallest eigenvalue of V + (i/2) sigma; non-negative for physical states."""
    V = np.asarray(V)
    return np.linalg.eigvalsh(V + 0.5j * SYMPLECTIC_FORM).min(axis=-1)


def _steps(schedule, dt, steps_per_period):
    if dt is None:
        return steps_per_period
    m = int(math.ceil(schedule.period / dt - 1e-9))
    if m < 1000:
        raise ValueError("dt must not exceed period / 1000")
    return m


def _check_physical(V, tol):
    worst = physicality(V)
    if np.min(worst) < -tol:
        raise Unphysical(f"covariance violates uncertainty relation by {-np.min(worst):.3e}")


def integrate_covariance(
    schedule,
    params,
    V0,
    t_end,
    dt=None,
    steps_per_period=STEPS_PER_PERIOD,
    stride=1,
    start_time=0.0,
    check_physical=True,
):
    """Integrate the Lyapunov equation from ``V0`` at ``start_time``.

    ``dt`` (if given) is rounded down so that an integer number of steps
    spans one period.  Returns every ``stride``-th state.
    """
    m = _steps(schedule, dt, steps_per_period)
    h = schedule.period / m
    n_steps = int(round(t_end / h))
    k0 = int(round(start_time / h))
    V0 = np.ascontiguousarray(V0, dtype=float)
    if check_physical:
        _check_physical(V0, 1e-8)
    a_grid = schedule.drift_grid(params, m)
    samples, fail = _kernels.lyapunov_rk4(
        a_grid, diffusion_matrix(params), h, V0, n_steps, stride, (2 * k0) % (2 * m), GUARD
    )
    if fail >= 0:
        raise Diverged("covariance diverged", time=start_time + (fail + 1) * h)
    times = start_time + h * stride * np.arange(len(samples))
    if check_physical:
        _check_physical(samples, 1e-6)
    return CovarianceSeries(times=times, V=samples)


def monodromy(schedule, params, steps_per_period=STEPS_PER_PERIOD):
    """Propagator of du/dt = A(t) u over one period."""
    m = steps_per_period
    a_grid = schedule.drift_grid(params, m)
    phi = _kernels.linear_rk4(a_grid, schedule.period / m, np.eye(4), m, 0)
    rho = float(np.max(np.abs(np.linalg.eigvals(phi))))
    if not np.all(np.isfinite(phi)):
        raise Diverged("monodromy diverged", time=schedule.period)
    return MonodromyMatrix(phi=phi, spectral_radius=rho, period=schedule.period)


def is_stable(phi):
    """Return ``(stable, margin)`` with margin = 1 - spectral radius."""
    margin = 1.0 - phi.spectral_radius
    return margin > 1e-9, margin


def _sym_basis():
    basis = []
    for i in range(4):
        for j in range(i, 4):
            b = np.zeros((4, 4))
            b[i, j] = b[j, i] = 1.0
            basis.append(b)
    return basis


def _vech(V):
    return V[np.triu_indices(4)]


def _unvech(x):
    V = np.zeros((4, 4))
    V[np.triu_indices(4)] = x
    return V + np.triu(V, 1).T


def periodic_steady_state(
    schedule,
    params,
    samples_per_period=SAMPLES_PER_PERIOD,
    steps_per_period=STEPS_PER_PERIOD,
    check_physical=True,
):
    """Exact periodic fixed point of the one-period Lyapunov map.

    The one-period map of the discretized Lyapunov flow is affine,
    P(V) = M[V] + Q.  Starting from the uncoupled thermal covariance V_ref,
    the fixed point is V_ref + (I - M)^{-1} (P(V_ref) - V_ref), solved over
    the 10 independent entries of a symmetric matrix.
    """
    m = steps_per_period
    if m % samples_per_period:
        raise ValueError("steps_per_period must be a multiple of samples_per_period")
    phi = monodromy(schedule, params, m)
    stable, margin = is_stable(phi)
    if not stable:
        raise Unstable(f"spectral radius {phi.spectral_radius:.12g} >= 1")

    h = schedule.period / m
    a_grid = schedule.drift_grid(params, m)
    diff = diffusion_matrix(params)
    zero = np.zeros((4, 4))

    cols = []
    for b in _sym_basis():
        out, _ = _kernels.lyapunov_rk4(a_grid, zero, h, b, m, m, 0, np.inf)
        cols.append(_vech(out[-1]))
    lin = np.array(cols).T

    v_ref = thermal_covariance(params)
    out, _ = _kernels.lyapunov_rk4(a_grid, diff, h, v_ref, m, m, 0, np.inf)
    resid = _vech(out[-1] - v_ref)
    system = np.eye(10) - lin
    if np.linalg.cond(system) > 1e14:
        raise SolveFailed("fixed-point system is singular")
    v_star = v_ref + _unvech(np.linalg.solve(system, resid))

    stride = m // samples_per_period
    out, fail = _kernels.lyapunov_rk4(a_grid, diff, h, v_star, m, stride, 0, GUARD)
    if fail >= 0:
        raise Diverged("steady-state propagation diverged", time=(fail + 1) * h)
    err = np.linalg.norm(out[-1] - out[0]) / np.linalg.norm(out[0])
    samples = out[:-1]
    if check_physical:
        _check_physical(samples, 1e-8)
    times = h * stride * np.arange(samples_per_period)
    return PeriodicCovariance(
        times=times,
        V=samples,
        period=schedule.period,
        schedule=schedule,
        params=params,
        steps_per_period=m,
        periodicity_error=float(err),
    )


def relaxed_steady_state(
    schedule,
    params,
    t_relax=None,
    V0=None,
    samples_per_period=SAMPLES_PER_PERIOD,
    steps_per_period=STEPS_PER_PERIOD,
):
    """Brute-force periodic state: integrate from ``V0`` past ``t_relax``.

    Integrates a whole number of periods covering at least ``t_relax``
    (default 200 / kappa) and returns the last period sampled like
    :func:`periodic_steady_state`.
    """
    if t_relax is None:
        t_relax = 200.0 / params.kappa
    if V0 is None:
        V0 = thermal_covariance(params)
    m = steps_per_period
    h = schedule.period / m
    n_periods = int(math.ceil(t_relax / schedule.period))
    a_grid = schedule.drift_grid(params, m)
    diff = diffusion_matrix(params)
    v = np.ascontiguousarray(V0, dtype=float)
    out, fail = _kernels.lyapunov_rk4(a_grid, diff, h, v, n_periods * m, n_periods * m, 0, GUARD)
    if fail >= 0:
        raise Diverged("relaxation diverged", time=(fail + 1) * h)
    stride = m // samples_per_period
    out, _ = _kernels.lyapunov_rk4(a_grid, diff, h, out[-1], m, stride, 0, GUARD)
    times = h * stride * np.arange(samples_per_period)
    return PeriodicCovariance(
        times=times,
        V=out[:-1],
        period=schedule.period,
        schedule=schedule,
        params=params,
        steps_per_period=m,
        periodicity_error=float(np.linalg.norm(out[-1] - out[0]) / np.linalg.norm(out[0])),
    )
