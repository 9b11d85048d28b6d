"""Analytic limit cycle as a double series in the coupling g and in harmonics.

Each first moment is written as

    <O>(t) = sum_j sum_n O[n, j] g**j exp(i n Omega t),    O = q, p, a.

The nonlinear terms are both proportional to g, so order j only needs the
orders below it:

    a[n, 0] = E_n / (kappa + i (Delta + n Omega)),   q[n, 0] = p[n, 0] = 0
    q[n, j] = omega_m * sum_k sum_m conj(a[m, k]) a[n + m, j - k - 1] / L_n
    p[n, j] = i n Omega q[n, j] / omega_m
    a[n, j] = i * sum_k sum_m a[m, k] q[n - m, j - k - 1] / (kappa + i (Delta + n Omega))

with the mechanical transfer denominator L_n = omega_m^2 - (n Omega)^2 +
i gamma_m n Omega.  Inner sums run over stored harmonics only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import ClassicalState
from .errors import FrequencyMismatch, RealityViolation, ResonantDenominator

J_MAX = 3
N_MAX = 2


@dataclass(frozen=True)
class PerturbativeSolution:
    """Coefficient tables indexed ``[j, n + n_max]``."""

    Omega: float
    j_max: int
    n_max: int
    g: float
    q: np.ndarray
    p: np.ndarray
    a: np.ndarray

    @property
    def period(self):
        return 2 * math.pi / self.Omega

    def coefficient(self, name, n, j):
        return complex(getattr(self, name)[j, n + self.n_max])

    def summed_coefficients(self, j_max=None):
        """Harmonics summed over coupling orders: three dicts ``{n: O_n}``."""
        j_max = self.j_max if j_max is None else j_max
        weights = self.g ** np.arange(j_max + 1)
        out = []
        for table in (self.q, self.p, self.a):
            summed = weights @ table[: j_max + 1]
            out.append({n: complex(summed[n + self.n_max]) for n in range(-self.n_max, self.n_max + 1)})
        return tuple(out)


def perturbative_coefficients(params, drive, j_max=J_MAX, n_max=N_MAX):
    if j_max < 0:
        raise ValueError("j_max must be non-negative")
    if drive.harmonics and max(abs(n) for n in drive.harmonics) > n_max:
        raise ValueError("n_max must cover every drive harmonic")
    w, Om = params.omega_m, drive.Omega
    ns = np.arange(-n_max, n_max + 1)
    size = 2 * n_max + 1

    cav = params.kappa + 1j * (params.delta + ns * Om)
    if np.any(np.abs(cav) == 0):
        raise ResonantDenominator("cavity denominator vanishes")
    mech = w**2 - (ns * Om) ** 2 + 1j * params.gamma_m * ns * Om
    if np.any(np.abs(mech) < 1e-12):
        raise ResonantDenominator("mechanical resonance at a stored harmonic")

    q = np.zeros((j_max + 1, size), dtype=complex)
    p = np.zeros_like(q)
    a = np.zeros_like(q)
    for n, e in drive.harmonics.items():
        a[0, n + n_max] = e / cav[n + n_max]

    for j in range(1, j_max + 1):
        for i, n in enumerate(ns):
            qs = 0j
            for k in range(j):
                for m in ns:
                    if abs(n + m) <= n_max:
                        qs += np.conj(a[k, m + n_max]) * a[j - k - 1, n + m + n_max]
            q[j, i] = w * qs / mech[i]
        p[j] = 1j * ns * Om * q[j] / w
        for i, n in enumerate(ns):
            s = 0j
            for k in range(j):
                for m in ns:
                    if abs(n - m) <= n_max:
                        s += a[k, m + n_max] * q[j - k - 1, n - m + n_max]
            a[j, i] = 1j * s / cav[i]
    return PerturbativeSolution(Om, j_max, n_max, params.g, q, p, a)


def evaluate(sol, t, tol=1e-9):
    """First moments of the analytic cycle at time(s) ``t``.

    Array-valued ``t`` gives a :class:`ClassicalState` of arrays.
    """
    t = np.asarray(t, dtype=float)
    qn, pn, an = sol.summed_coefficients()
    vals = []
    for table in (qn, pn, an):
        total = np.zeros(t.shape, dtype=complex)
        for n, c in table.items():
            total = total + c * np.exp(1j * n * sol.Omega * t)
        vals.append(total)
    q, p, a = vals
    for name, z in (("q", q), ("p", p)):
        scale = max(1.0, float(np.max(np.abs(z))))
        if np.max(np.abs(z.imag)) > tol * scale:
            raise RealityViolation(f"<{name}> has an imaginary part")
    if t.ndim == 0:
        return ClassicalState(float(q.real), float(p.real), complex(a))
    return ClassicalState(q.real, p.real, a)


def compare_with_numerical(sol, cycle, n_samples=256):
    """Max distance between analytic and numerical cycles over one period.

    Normalized by the largest norm of the numerical state (q, p, Re a, Im a)
    over the period.
    """
    if not math.isclose(sol.Omega, cycle.Omega, rel_tol=1e-12):
        raise FrequencyMismatch(f"Omega {sol.Omega} != {cycle.Omega}")
    t = np.linspace(0.0, cycle.period, n_samples, endpoint=False)
    ana = evaluate(sol, t)
    q, p, a = cycle.reconstruct(t)
    num = np.stack([q, p, a.real, a.imag])
    diff = np.stack([ana.q, ana.p, ana.a.real, ana.a.imag]) - num
    return float(np.linalg.norm(diff, axis=0).max() / np.linalg.norm(num, axis=0).max())
