"""Compiled fixed-step RK4 kernels.

All kernels step on a uniform grid.  Time-dependent coefficients of the
linear kernels are passed as a periodic half-step grid ``a_grid`` of shape
``(2 * m, 4, 4)`` holding A(j * h / 2) for j = 0 .. 2m - 1, where m is the
number of steps per period.  A step starting at half-grid index ``i`` uses
entries ``i``, ``i + 1`` and ``i + 2`` (mod 2m).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _lyap_rhs(a, v, d, out):
    # v is symmetric, so A V + (A V)^T covers both terms
    for i in range(4):
        for j in range(4):
            s = 0.0
            for k in range(4):
                s += a[i, k] * v[k, j]
            out[i, j] = s
    for i in range(4):
        out[i, i] = d[i, i] + 2.0 * out[i, i]
        for j in range(i + 1, 4):
            s = d[i, j] + out[i, j] + out[j, i]
            out[i, j] = s
            out[j, i] = s


@njit(cache=True)
def _lin_rhs(a, u, out):
    for i in range(4):
        for j in range(4):
            s = 0.0
            for k in range(4):
                s += a[i, k] * u[k, j]
            out[i, j] = s


@njit(cache=True)
def lyapunov_rk4(a_grid, diff, h, v0, n_steps, stride, start, guard):
    """Integrate dV/dt = A V + V A^T + D.

    Returns ``(samples, fail_step)`` where samples holds V every ``stride``
    steps (including the initial value) and ``fail_step`` is -1 on success
    or the step at which max|V| exceeded ``guard``.
    """
    m2 = a_grid.shape[0]
    n_out = n_steps // stride + 1
    out = np.zeros((n_out, 4, 4))
    v = v0.copy()
    out[0] = v
    k1 = np.empty((4, 4))
    k2 = np.empty((4, 4))
    k3 = np.empty((4, 4))
    k4 = np.empty((4, 4))
    tmp = np.empty((4, 4))
    half = 0.5 * h
    sixth = h / 6.0
    for s in range(n_steps):
        i0 = (start + 2 * s) % m2
        i1 = (i0 + 1) % m2
        i2 = (i0 + 2) % m2
        _lyap_rhs(a_grid[i0], v, diff, k1)
        for i in range(4):
            for j in range(4):
                tmp[i, j] = v[i, j] + half * k1[i, j]
        _lyap_rhs(a_grid[i1], tmp, diff, k2)
        for i in range(4):
            for j in range(4):
                tmp[i, j] = v[i, j] + half * k2[i, j]
        _lyap_rhs(a_grid[i1], tmp, diff, k3)
        for i in range(4):
            for j in range(4):
                tmp[i, j] = v[i, j] + h * k3[i, j]
        _lyap_rhs(a_grid[i2], tmp, diff, k4)
        for i in range(4):
            for j in range(4):
                v[i, j] += sixth * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
        for i in range(4):
            for j in range(i + 1, 4):
                m = 0.5 * (v[i, j] + v[j, i])
                v[i, j] = m
                v[j, i] = m
        bad = False
        for i in range(4):
            for j in range(4):
                if not abs(v[i, j]) <= guard:
                    bad = True
        if bad:
            return out[: s // stride + 1], s
        if (s + 1) % stride == 0:
            out[(s + 1) // stride] = v
    return out, -1


@njit(cache=True)
def linear_rk4(a_grid, h, u0, n_steps, start):
    """Propagate the 4x4 matrix U under dU/dt = A(t) U for ``n_steps`` steps."""
    m2 = a_grid.shape[0]
    u = u0.copy()
    k1 = np.empty((4, 4))
    k2 = np.empty((4, 4))
    k3 = np.empty((4, 4))
    k4 = np.empty((4, 4))
    tmp = np.empty((4, 4))
    half = 0.5 * h
    sixth = h / 6.0
    for s in range(n_steps):
        i0 = (start + 2 * s) % m2
        i1 = (i0 + 1) % m2
        i2 = (i0 + 2) % m2
        _lin_rhs(a_grid[i0], u, k1)
        for i in range(4):
            for j in range(4):
                tmp[i, j] = u[i, j] + half * k1[i, j]
        _lin_rhs(a_grid[i1], tmp, k2)
        for i in range(4):
            for j in range(4):
                tmp[i, j] = u[i, j] + half * k2[i, j]
        _lin_rhs(a_grid[i1], tmp, k3)
        for i in range(4):
            for j in range(4):
                tmp[i, j] = u[i, j] + h * k3[i, j]
        _lin_rhs(a_grid[i2], tmp, k4)
        for i in range(4):
            for j in range(4):
                u[i, j] += sixth * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
    return u


@njit(cache=True)
def _drive(t, omega, n_idx, e_re, e_im):
    er = 0.0
    ei = 0.0
    for k in range(n_idx.shape[0]):
        ph = n_idx[k] * omega * t
        c = np.cos(ph)
        s = np.sin(ph)
        er += e_re[k] * c - e_im[k] * s
        ei += e_re[k] * s + e_im[k] * c
    return er, ei


@njit(cache=True)
def _classical_rhs(x, t, pars, omega, n_idx, e_re, e_im, out):
    omega_m, gamma_m, kappa, delta, g = pars[0], pars[1], pars[2], pars[3], pars[4]
    q, p, ar, ai = x[0], x[1], x[2], x[3]
    er, ei = _drive(t, omega, n_idx, e_re, e_im)
    det = delta - g * q
    out[0] = omega_m * p
    out[1] = -omega_m * q - gamma_m * p + g * (ar * ar + ai * ai)
    out[2] = -kappa * ar + det * ai + er
    out[3] = -kappa * ai - det * ar + ei


@njit(cache=True)
def _classical_jac(x, pars, out):
    omega_m, gamma_m, kappa, delta, g = pars[0], pars[1], pars[2], pars[3], pars[4]
    q, ar, ai = x[0], x[2], x[3]
    det = delta - g * q
    out[:, :] = 0.0
    out[0, 1] = omega_m
    out[1, 0] = -omega_m
    out[1, 1] = -gamma_m
    out[1, 2] = 2.0 * g * ar
    out[1, 3] = 2.0 * g * ai
    out[2, 0] = -g * ai
    out[2, 2] = -kappa
    out[2, 3] = det
    out[3, 0] = g * ar
    out[3, 1] = 0.0
    out[3, 2] = -det
    out[3, 3] = -kappa


@njit(cache=True)
def classical_rk4(x0, t0, h, n_steps, stride, pars, omega, n_idx, e_re, e_im, guard):
    """Integrate the first-moment equations in real coordinates (q, p, Re a, Im a).

    Returns ``(samples, fail_step)`` like :func:`lyapunov_rk4`.
    """
    n_out = n_steps // stride + 1
    out = np.zeros((n_out, 4))
    x = x0.copy()
    out[0] = x
    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    tmp = np.empty(4)
    for s in range(n_steps):
        t = t0 + s * h
        _classical_rhs(x, t, pars, omega, n_idx, e_re, e_im, k1)
        for i in range(4):
            tmp[i] = x[i] + 0.5 * h * k1[i]
        _classical_rhs(tmp, t + 0.5 * h, pars, omega, n_idx, e_re, e_im, k2)
        for i in range(4):
            tmp[i] = x[i] + 0.5 * h * k2[i]
        _classical_rhs(tmp, t + 0.5 * h, pars, omega, n_idx, e_re, e_im, k3)
        for i in range(4):
            tmp[i] = x[i] + h * k3[i]
        _classical_rhs(tmp, t + h, pars, omega, n_idx, e_re, e_im, k4)
        bad = False
        for i in range(4):
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            if not abs(x[i]) <= guard:
                bad = True
        if bad:
            return out[: s // stride + 1], s
        if (s + 1) % stride == 0:
            out[(s + 1) // stride] = x
    return out, -1


@njit(cache=True)
def classical_rk4_variational(x0, t0, h, n_steps, pars, omega, n_idx, e_re, e_im):
    """Integrate the state together with its 4x4 sensitivity matrix.

    Returns the final state and d x(t_end) / d x0, both propagated with RK4
    applied to the augmented system.
    """
    x = x0.copy()
    jm = np.eye(4)
    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    tmp = np.empty(4)
    f = np.empty((4, 4))
    m1 = np.empty((4, 4))
    m2 = np.empty((4, 4))
    m3 = np.empty((4, 4))
    m4 = np.empty((4, 4))
    jt = np.empty((4, 4))
    for s in range(n_steps):
        t = t0 + s * h
        _classical_rhs(x, t, pars, omega, n_idx, e_re, e_im, k1)
        _classical_jac(x, pars, f)
        _lin_rhs(f, jm, m1)
        for i in range(4):
            tmp[i] = x[i] + 0.5 * h * k1[i]
            for j in range(4):
                jt[i, j] = jm[i, j] + 0.5 * h * m1[i, j]
        _classical_rhs(tmp, t + 0.5 * h, pars, omega, n_idx, e_re, e_im, k2)
        _classical_jac(tmp, pars, f)
        _lin_rhs(f, jt, m2)
        for i in range(4):
            tmp[i] = x[i] + 0.5 * h * k2[i]
            for j in range(4):
                jt[i, j] = jm[i, j] + 0.5 * h * m2[i, j]
        _classical_rhs(tmp, t + 0.5 * h, pars, omega, n_idx, e_re, e_im, k3)
        _classical_jac(tmp, pars, f)
        _lin_rhs(f, jt, m3)
        for i in range(4):
            tmp[i] = x[i] + h * k3[i]
            for j in range(4):
                jt[i, j] = jm[i, j] + h * m3[i, j]
        _classical_rhs(tmp, t + h, pars, omega, n_idx, e_re, e_im, k4)
        _classical_jac(tmp, pars, f)
        _lin_rhs(f, jt, m4)
        for i in range(4):
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            for j in range(4):
                jm[i, j] += h / 6.0 * (m1[i, j] + 2.0 * m2[i, j] + 2.0 * m3[i, j] + m4[i, j])
    return x, jm
