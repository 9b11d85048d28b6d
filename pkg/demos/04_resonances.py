# # Entangling resonances of the modulation frequency
#
# Sweeping Omega at fixed coupling shows two peaks of the periodic maximum
# of E_N.  A rotating-wave estimate puts them at 2 -/+ g0; the full
# normal-mode frequencies of the coupled system shift them noticeably at
# larger g0.

# ## Imports

import numpy as np

from optomech import experiments as ex
from optomech.entanglement import predict_resonances
from optomech.model import SystemParams, drift_matrix

# ## Sweep from a config dictionary

raw = {
    "units": "omega_m",
    "mode": "prescribed-coupling",
    "params": {"kappa": 0.2, "gamma_m": 1e-6, "delta": 1.0},
    "coupling": {"Omega": 1.4, "g0": 0.6, "g_mod": 0.1},
    "sweep": {"variable": "Omega", "start": 1.0, "stop": 3.0, "num": 101},
}
result = ex.sweep_modulation_frequency(ex.build_config(raw))

span = np.ptp(result.E_N_max)
for peak in ex.find_peaks(result, min_prominence=0.05 * span):
    print(f"peak at Omega = {peak.location:.3f}, E_N = {peak.height:.3f}")

# ## Where the peaks are expected

print("rotating-wave estimate:", predict_resonances(0.6))

# twice the normal-mode frequencies of the uncoupled-noise drift matrix
A = drift_matrix(0.6, 1.0, SystemParams(kappa=0.2, gamma_m=1e-6))
modes = np.sort(np.abs(np.linalg.eigvals(A).imag))[::2]
print("from normal modes:", 2 * modes)
