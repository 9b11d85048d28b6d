# # Realistic drives: optical and microwave parameter sets
#
# The physical-drive mode derives the coupling schedule from the limit
# cycle.  These are the same configs the command line uses, for instance
#
#     optomech trace --config configs/microwave.json --output microwave_trace.csv

# ## Imports

from pathlib import Path

import numpy as np

from optomech import experiments as ex

configs = Path(__file__).resolve().parent.parent / "configs"

# ## Microwave circuit: modulation helps

modulated = ex.run_time_trace(ex.load_config(configs / "microwave.json"))
plain = ex.run_time_trace(ex.load_config(configs / "microwave.json", ["drive.E_mod=0.0"]))
print("modulated:", modulated.E_N_max, " unmodulated:", plain.E_N_max)

t, e = modulated.columns["t"], modulated.columns["E_N"]
print("steady state from t =", modulated.steady_start)
np.column_stack([t, e])[::200]

# ## Optical cavity: how strong a sideband keeps the orbit stable?

config = ex.load_config(
    configs / "optical.json",
    ['sweep={"variable": "E_mod", "start": 0.0, "stop": 30000.0, "num": 7}'],
)
for value, rho, margin, stable, err in ex.stability_scan(config):
    print(f"E_mod = {value:8.0f}  spectral radius {rho:.4f}  stable {stable}")

# ## With a slightly higher modulation frequency the stronger sideband is fine

config = ex.load_config(configs / "optical.json", ["drive.Omega=1.5"])
ex.run_time_trace(config).E_N_max
