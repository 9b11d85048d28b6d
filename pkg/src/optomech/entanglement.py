"""Logarithmic negativity of two-mode Gaussian states and its periodic maximum."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalDomain


@dataclass(frozen=True)
class EntanglementTrace:
    times: np.ndarray
    E_N: np.ndarray
    E_N_max: float
    argmax_time: float


# log-negativities below this are rounding noise and reported as exactly 0
E_N_FLOOR = 1e-14


def _det2(M):
    return M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]


def _symplectic_pair(V, sign):
    V = np.asarray(V, dtype=float)
    A, B, C = V[..., :2, :2], V[..., 2:, 2:], V[..., :2, 2:]
    sigma = _det2(A) + _det2(B) + sign * 2.0 * _det2(C)
    det_v = np.linalg.det(V)
    disc = sigma**2 - 4.0 * det_v
    scale = np.maximum(sigma**2, 1.0)
    if np.any(disc < -1e-12 * scale):
        raise NumericalDomain("negative discriminant: covariance matrix is not physical")
    root = np.sqrt(np.maximum(disc, 0.0))
    hi2 = (sigma + root) / 2.0
    # the small root from the product of roots, free of cancellation
    with np.errstate(divide="ignore", invalid="ignore"):
        lo2 = np.where(hi2 > 0, det_v / np.where(hi2 > 0, hi2, 1.0), 0.0)
    # product states (C = 0): the spectrum is exactly that of the two modes
    product = np.all(C == 0, axis=(-2, -1))
    da, db = _det2(A), _det2(B)
    lo2 = np.where(product, np.minimum(da, db), lo2)
    hi2 = np.where(product, np.maximum(da, db), hi2)
    return np.sqrt(np.maximum(lo2, 0.0)), np.sqrt(np.maximum(hi2, 0.0))


def symplectic_eigenvalues_pt(V):
    """Symplectic eigenvalues of the partially transposed covariance matrix.

    Returns ``(nu_minus, nu_plus)``.  Works on a single 4x4 matrix or on a
    stack of shape ``(..., 4, 4)``.
    """
    lo, hi = _symplectic_pair(V, -1.0)
    if np.ndim(lo) == 0:
        return float(lo), float(hi)
    return lo, hi


def symplectic_eigenvalues(V):
    """Symplectic eigenvalues of V itself (both >= 1/2 for physical states)."""
    lo, hi = _symplectic_pair(V, 1.0)
    if np.ndim(lo) == 0:
        return float(lo), float(hi)
    return lo, hi


def log_negativity(V):
    """E_N = max(0, -ln(2 nu_minus)), natural log, vacuum variance 1/2.

    Values below ``E_N_FLOOR`` are returned as exactly 0.
    """
    nu, _ = _symplectic_pair(V, -1.0)
    with np.errstate(divide="ignore"):
        e = np.maximum(0.0, -np.log(2.0 * nu))
    e = np.where(e < E_N_FLOOR, 0.0, e)
    if np.ndim(e) == 0:
        return float(e)
    return e


def max_entanglement_over_period(steady, refine=8):
    """Trace of E_N over one steady-state period and its maximum.

    ``steady`` is a :class:`~optomech.covariance.PeriodicCovariance`.  The
    neighbourhood of the best sample is re-sampled ``refine`` times finer
    once (skipped when ``refine`` <= 1 or the trace is flat).
    """
    times = np.asarray(steady.times)
    e = log_negativity(steady.V)
    k = int(np.argmax(e))
    best_t, best = float(times[k]), float(e[k])
    spacing = steady.period / len(times)
    if refine > 1 and np.ptp(e) > 0:
        t0 = times[k] - spacing
        fine_t, fine_v = steady.resample(t0, t0 + 2 * spacing, 2 * refine + 1)
        fine_e = log_negativity(fine_v)
        j = int(np.argmax(fine_e))
        if fine_e[j] > best:
            best, best_t = float(fine_e[j]), float(fine_t[j] % steady.period)
    return EntanglementTrace(times=times, E_N=e, E_N_max=best, argmax_time=best_t)


def predict_resonances(g_0_eff, omega_m=1.0):
    """Modulation frequencies 2 omega_m -/+ g0 of the two entangling resonances.

    At strong coupling the cavity and mechanics hybridize into normal modes
    near omega_m -/+ g0/2; two-mode squeezing is resonant when the modulation
    matches the sum of the mode frequencies it couples.
    """
    if g_0_eff < 0:
        raise ValueError("g_0_eff must be non-negative")
    return 2 * omega_m - g_0_eff, 2 * omega_m + g_0_eff


def normal_mode_frequencies(g_0_eff, omega_m=1.0):
    return omega_m - g_0_eff / 2, omega_m + g_0_eff / 2
