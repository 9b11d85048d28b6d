"""Physical parameters, periodic drives and the linearized drift/diffusion matrices.

All frequencies and rates are expressed in units of the mechanical
frequency, so ``omega_m`` is 1 unless explicitly overridden.  Quadratures
follow the convention x = (a + a^dag)/sqrt(2), which gives vacuum
variance 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """Constants of the cavity + mechanical resonator system.

    Parameters
    ----------
    kappa : float
        Cavity amplitude decay rate.
    gamma_m : float
        Mechanical damping rate.
    delta : float
        Bare detuning of the drive from the cavity, omega_a - omega_l.
    g : float
        Single-photon radiation-pressure coupling.
    n_m, n_a : float
        Mean thermal occupations of the mechanical and cavity baths.
    omega_m : float
        Mechanical frequency (the unit of frequency).
    """

    kappa: float
    gamma_m: float
    delta: float = 1.0
    g: float = 0.0
    n_m: float = 0.0
    n_a: float = 0.0
    omega_m: float = 1.0

    def __post_init__(self):
        if not self.omega_m > 0:
            raise ValueError(f"omega_m must be positive, got {self.omega_m}")
        for name in ("kappa", "gamma_m", "g", "n_m", "n_a"):
            value = getattr(self, name)
            if not value >= 0:
                raise ValueError(f"{name} must be non-negative, got {value}")


def _clean_harmonics(harmonics):
    out = {}
    for n, c in dict(harmonics).items():
        if int(n) != n:
            raise ValueError(f"harmonic index must be an integer, got {n!r}")
        out[int(n)] = complex(c)
    return dict(sorted(out.items()))


def _fourier_sum(harmonics, omega, t):
    t = np.asarray(t, dtype=float)
    total = np.zeros(t.shape, dtype=complex)
    for n, c in harmonics.items():
        total = total + c * np.exp(1j * n * omega * t)
    return total


@dataclass(frozen=True, eq=True)
class DriveSpec:
    """Periodic drive E(t) = sum_n E_n exp(i n Omega t)."""

    Omega: float
    harmonics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.Omega > 0:
            raise ValueError(f"Omega must be positive, got {self.Omega}")
        object.__setattr__(self, "harmonics", _clean_harmonics(self.harmonics))

    __hash__ = None

    @classmethod
    def two_tone(cls, E0, E_mod, Omega):
        """Carrier ``E0`` plus a sideband ``E_mod * exp(-i Omega t)``."""
        harmonics = {0: E0}
        if E_mod != 0:
            harmonics[-1] = E_mod
        return cls(Omega=Omega, harmonics=harmonics)

    @property
    def period(self):
        return 2 * math.pi / self.Omega

    def __call__(self, t):
        return _fourier_sum(self.harmonics, self.Omega, t)


@dataclass(frozen=True, eq=True)
class EffectiveCouplingSpec:
    """Directly prescribed periodic effective coupling with constant detuning."""

    Omega: float
    g_harmonics: dict = field(default_factory=dict)
    delta_eff: float = 1.0

    def __post_init__(self):
        if not self.Omega > 0:
            raise ValueError(f"Omega must be positive, got {self.Omega}")
        object.__setattr__(self, "g_harmonics", _clean_harmonics(self.g_harmonics))

    __hash__ = None

    @classmethod
    def single_sideband(cls, g0, g_mod, Omega, delta_eff=1.0):
        """g(t) = g0 + g_mod * exp(-i Omega t)."""
        harmonics = {0: g0}
        if g_mod != 0:
            harmonics[-1] = g_mod
        return cls(Omega=Omega, g_harmonics=harmonics, delta_eff=delta_eff)

    @property
    def period(self):
        return 2 * math.pi / self.Omega

    def __call__(self, t):
        return _fourier_sum(self.g_harmonics, self.Omega, t)


def thermal_occupation(omega, T, hbar_over_kB):
    """Bose-Einstein mean occupation 1 / (exp(hbar omega / kB T) - 1).

    ``hbar_over_kB`` is the ratio hbar / k_B in the units used for ``omega``
    and ``T`` (7.638e-12 K s for SI angular frequency and kelvin).
    """
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if T < 0:
        raise ValueError(f"temperature must be non-negative, got {T}")
    if T == 0:
        return 0.0
    x = hbar_over_kB * omega / T
    if x > 700.0:
        # expm1 overflows; the occupation is exp(-x) to double precision
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def effective_detuning(params, q_mean):
    return params.delta - params.g * q_mean


def effective_coupling(params, a_mean):
    """Field-enhanced coupling sqrt(2) g <a>."""
    return math.sqrt(2) * params.g * a_mean


def drift_matrix(g_eff, delta_eff, params):
    """Drift matrix of the fluctuations (dq, dp, dx, dy).

    Broadcasts over array-valued ``g_eff`` / ``delta_eff``; the result has
    shape ``broadcast_shape + (4, 4)``.
    """
    g_eff = np.asarray(g_eff, dtype=complex)
    delta_eff = np.asarray(delta_eff, dtype=float)
    shape = np.broadcast_shapes(g_eff.shape, delta_eff.shape)
    gr = np.broadcast_to(g_eff.real, shape)
    gi = np.broadcast_to(g_eff.imag, shape)
    de = np.broadcast_to(delta_eff, shape)
    a = np.zeros(shape + (4, 4))
    a[..., 0, 1] = params.omega_m
    a[..., 1, 0] = -params.omega_m
    a[..., 1, 1] = -params.gamma_m
    a[..., 1, 2] = gr
    a[..., 1, 3] = gi
    a[..., 2, 0] = -gi
    a[..., 2, 2] = -params.kappa
    a[..., 2, 3] = de
    a[..., 3, 0] = gr
    a[..., 3, 2] = -de
    a[..., 3, 3] = -params.kappa
    return a


def diffusion_matrix(params):
    return np.diag(
        [
            0.0,
            params.gamma_m * (2 * params.n_m + 1),
            params.kappa * (2 * params.n_a + 1),
            params.kappa * (2 * params.n_a + 1),
        ]
    )


def thermal_covariance(params):
    """Covariance of the uncoupled thermal state of both modes."""
    return np.diag(
        [params.n_m + 0.5, params.n_m + 0.5, params.n_a + 0.5, params.n_a + 0.5]
    )
