"""First moments: the semiclassical equations and their periodic orbits.

    d<q>/dt = omega_m <p>
    d<p>/dt = -omega_m <q> - gamma_m <p> + g |<a>|^2
    d<a>/dt = -(kappa + i Delta) <a> + i g <a> <q> + E(t)

Integration is classical RK4 on a fixed grid.  The mechanical transient
decays on the 1/gamma_m timescale, which is enormous at realistic damping,
so the periodic orbit is located by Newton shooting on the one-period map
rather than by waiting for it to relax.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import Diverged, NotConverged

GUARD = 1e12
STEPS_PER_PERIOD = 2048
N_MAX = 4


@dataclass(frozen=True)
class ClassicalState:
    q: float
    p: float
    a: complex

    def to_array(self):
        return np.array([self.q, self.p, self.a.real, self.a.imag], dtype=float)

    @classmethod
    def from_array(cls, x):
        return cls(float(x[0]), float(x[1]), complex(x[2], x[3]))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    a: np.ndarray

    def __len__(self):
        return len(self.times)

    def state(self, k):
        return ClassicalState(float(self.q[k]), float(self.p[k]), complex(self.a[k]))


@dataclass(frozen=True)
class LimitCycle:
    """Fourier representation of a periodic first-moment orbit.

    ``q``, ``p`` and ``a`` map the harmonic index n (|n| <= n_max) to the
    complex coefficient of exp(i n Omega t).
    """

    Omega: float
    n_max: int
    q: dict
    p: dict
    a: dict
    residual: float = 0.0

    @property
    def period(self):
        return 2 * math.pi / self.Omega

    def reconstruct(self, t):
        """Return ``(q, p, a)`` arrays at times ``t``."""
        t = np.asarray(t, dtype=float)
        out = []
        for table in (self.q, self.p, self.a):
            total = np.zeros(t.shape, dtype=complex)
            for n, c in table.items():
                total = total + c * np.exp(1j * n * self.Omega * t)
            out.append(total)
        return out[0].real, out[1].real, out[2]

    def state_at(self, t):
        q, p, a = self.reconstruct(t)
        return ClassicalState(float(q), float(p), complex(a))


def _kernel_args(params, drive):
    pars = np.array([params.omega_m, params.gamma_m, params.kappa, params.delta, params.g])
    n_idx = np.array(list(drive.harmonics), dtype=np.float64)
    amps = np.array(list(drive.harmonics.values()), dtype=complex)
    return pars, drive.Omega, n_idx, np.ascontiguousarray(amps.real), np.ascontiguousarray(amps.imag)


def classical_rhs(state, t, params, drive):
    """Time derivative of the first moments, as a :class:`ClassicalState`."""
    q, p, a = state.q, state.p, complex(state.a)
    dq = params.omega_m * p
    dp = -params.omega_m * q - params.gamma_m * p + params.g * abs(a) ** 2
    da = -(params.kappa + 1j * params.delta) * a + 1j * params.g * a * q + complex(drive(t))
    return ClassicalState(dq, dp, da)


def zeroth_order_state(params, drive):
    """Uncoupled cavity response to the carrier, mechanics at rest."""
    e0 = drive.harmonics.get(0, 0.0)
    return ClassicalState(0.0, 0.0, e0 / (params.kappa + 1j * params.delta))


def integrate_classical(params, drive, initial=None, t_end=None, dt=None, stride=1, t0=0.0):
    """Fixed-step RK4 integration of the first moments.

    Defaults: ``t_end = 200 / kappa``, ``dt = period / 2048`` and the
    zeroth-order fixed point as initial state.  Raises :class:`Diverged`
    when any component exceeds 1e12 in magnitude.
    """
    tau = drive.period
    if dt is None:
        dt = tau / STEPS_PER_PERIOD
    if t_end is None:
        t_end = 200.0 / params.kappa
    if not dt > 0 or not t_end > 0:
        raise ValueError("dt and t_end must be positive")
    if dt > tau / 1000 * (1 + 1e-12):
        raise ValueError("dt must not exceed period / 1000")
    if initial is None:
        initial = zeroth_order_state(params, drive)
    n_steps = int(round(t_end / dt))
    samples, fail = _kernels.classical_rk4(
        initial.to_array(), t0, dt, n_steps, stride, *_kernel_args(params, drive), GUARD
    )
    if fail >= 0:
        raise Diverged("first moments diverged", time=t0 + (fail + 1) * dt)
    times = t0 + dt * stride * np.arange(len(samples))
    return Trajectory(times, samples[:, 0], samples[:, 1], samples[:, 2] + 1j * samples[:, 3])


def extract_limit_cycle(traj, Omega, n_max=N_MAX, tol=1e-6):
    """Fourier coefficients of the last full period of ``traj``.

    The trajectory must be uniformly sampled with an integer number
    (>= 64) of samples per period and cover at least two periods.
    ``residual`` is the largest per-component relative change over one
    period; :class:`NotConverged` is raised when it exceeds ``tol``.
    """
    times = np.asarray(traj.times)
    dt = times[1] - times[0]
    tau = 2 * math.pi / Omega
    per = tau / dt
    m = int(round(per))
    if abs(per - m) > 1e-6 * per:
        raise ValueError("sampling interval does not divide the period")
    if m < 64:
        raise ValueError("need at least 64 samples per period")
    if len(times) < 2 * m + 1:
        raise ValueError("trajectory must cover at least two periods")

    x = np.stack([traj.q, traj.p, traj.a.real, traj.a.imag], axis=1)
    last = x[-m:]
    prev = x[-2 * m: -m]
    scale = np.maximum(1.0, np.abs(last).max(axis=0))
    residual = float((np.abs(last - prev) / scale).max())

    t_last = times[-m:]
    tables = []
    for series in (traj.q[-m:], traj.p[-m:], traj.a[-m:]):
        coeffs = {}
        for n in range(-n_max, n_max + 1):
            coeffs[n] = complex(np.mean(series * np.exp(-1j * n * Omega * t_last)))
        tables.append(coeffs)
    cycle = LimitCycle(Omega, n_max, tables[0], tables[1], tables[2], residual)
    if residual > tol:
        raise NotConverged(f"trajectory tail not periodic: residual {residual:.3e} > {tol:.1e}")
    return cycle


def find_periodic_orbit(params, drive, initial=None, steps_per_period=STEPS_PER_PERIOD,
                        tol=1e-12, max_iter=30):
    """State at t = 0 on the periodic orbit, by Newton shooting.

    Solves x = F(x) where F is the RK4 one-period map, using the
    variational equations for the Jacobian.
    """
    tau = drive.period
    h = tau / steps_per_period
    args = _kernel_args(params, drive)
    x = (initial or zeroth_order_state(params, drive)).to_array()
    # seed the static radiation-pressure displacement
    if initial is None and params.g:
        x[0] = params.g * (x[2] ** 2 + x[3] ** 2) / params.omega_m
    for _ in range(max_iter):
        fx, jac = _kernels.classical_rk4_variational(x, 0.0, h, steps_per_period, *args)
        if not np.all(np.isfinite(fx)):
            raise Diverged("shooting diverged", time=tau)
        r = fx - x
        if np.linalg.norm(r) < tol * max(1.0, np.linalg.norm(fx)):
            return ClassicalState.from_array(fx)
        dx = np.linalg.solve(jac - np.eye(4), -r)
        x = x + dx
    raise NotConverged("shooting did not converge")


def compute_limit_cycle(params, drive, n_max=N_MAX, steps_per_period=STEPS_PER_PERIOD, tol=1e-6):
    """Periodic orbit by shooting, then two integrated periods for extraction."""
    x0 = find_periodic_orbit(params, drive, steps_per_period=steps_per_period)
    traj = integrate_classical(
        params, drive, initial=x0, t_end=2 * drive.period, dt=drive.period / steps_per_period
    )
    return extract_limit_cycle(traj, drive.Omega, n_max=n_max, tol=tol)
