# # The classical limit cycle of a two-tone driven cavity
#
# A carrier E0 plus a sideband E_mod exp(-i Omega t) drives the cavity.
# The first moments settle onto an orbit of period 2 pi / Omega.  With
# mechanical damping of 3e-6 the transient would take ~1e6 time units to
# die out, so the orbit is found by Newton shooting on the one-period map.

# ## Imports

import numpy as np

from optomech.classical import compute_limit_cycle, find_periodic_orbit
from optomech.model import DriveSpec, SystemParams, effective_coupling
from optomech.perturbative import compare_with_numerical, evaluate, perturbative_coefficients

# ## Microwave-circuit parameters (units of the mechanical frequency)

params = SystemParams(kappa=0.02, gamma_m=3e-6, delta=1.0, g=2e-5, n_m=200.0, n_a=0.03)
drive = DriveSpec.two_tone(9e3, 1.3e3, Omega=1.3)

x0 = find_periodic_orbit(params, drive)
x0

# ## Fourier coefficients of the orbit

cycle = compute_limit_cycle(params, drive)
print("residual over one period:", cycle.residual)
for n in range(-2, 3):
    print(n, abs(cycle.q[n]), abs(cycle.a[n]))

# the resulting effective coupling has a strong static part and a sideband
g0 = effective_coupling(params, cycle.a[0])
g_mod = effective_coupling(params, cycle.a[-1])
print(abs(g0), abs(g_mod))

# ## Comparison with the perturbative series
#
# Orders in g up to 3 and harmonics |n| <= 2 already land within a few
# tenths of a percent.

for j_max in (1, 2, 3, 6):
    sol = perturbative_coefficients(params, drive, j_max=j_max, n_max=2)
    print(j_max, compare_with_numerical(sol, cycle))

t = np.linspace(0, cycle.period, 5)
q_num, _, a_num = cycle.reconstruct(t)
ana = evaluate(perturbative_coefficients(params, drive), t)
np.column_stack([q_num, ana.q, abs(a_num), abs(ana.a)])
