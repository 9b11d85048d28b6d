# # Periodic steady state of the fluctuations
#
# With a periodic effective coupling the covariance obeys a Lyapunov
# equation with periodic coefficients.  Stability follows from the
# monodromy matrix; the steady state is the fixed point of the one-period
# map, computed exactly instead of waiting for relaxation.

# ## Imports

import numpy as np

from optomech.covariance import (
    CouplingSchedule,
    is_stable,
    monodromy,
    periodic_steady_state,
    physicality,
    relaxed_steady_state,
)
from optomech.entanglement import max_entanglement_over_period
from optomech.model import SystemParams

params = SystemParams(kappa=0.2, gamma_m=1e-6, delta=1.0)

# ## A sideband on top of a static coupling

schedule = CouplingSchedule(Omega=1.3, g_harmonics={0: 0.6, -1: 0.1}, delta_harmonics={0: 1.0})
phi = monodromy(schedule, params)
print(phi.spectral_radius, is_stable(phi))

# ## Exact periodic state

steady = periodic_steady_state(schedule, params)
print("periodicity error:", steady.periodicity_error)
print("uncertainty relation margin:", physicality(steady.V).min())

trace = max_entanglement_over_period(steady)
print("E_N over the period: min", trace.E_N.min(), "max", trace.E_N_max)

# ## Brute-force relaxation agrees

relaxed = relaxed_steady_state(schedule, params, steps_per_period=1024)
np.abs(relaxed.V - steady.V).max()

# ## Too much modulation destabilizes the orbit

for g_mod in (0.1, 0.15, 0.2, 0.25):
    s = CouplingSchedule(1.4, {0: 0.6, -1: g_mod}, {0: 1.0})
    print(g_mod, monodromy(s, params).spectral_radius)
