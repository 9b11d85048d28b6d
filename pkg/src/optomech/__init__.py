"""Entanglement between a cavity mode and a mechanical resonator under modulated driving.

Submodules:

- ``model``: parameters, drives, drift and diffusion matrices
- ``classical``: first-moment equations, limit cycles
- ``perturbative``: analytic limit cycle as a series in the coupling
- ``covariance``: Lyapunov dynamics, monodromy, periodic steady state
- ``entanglement``: logarithmic negativity and resonance estimates
- ``experiments``: configs, sweeps, traces, CSV output (CLI in ``cli``)
"""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    DriveSpec,
    EffectiveCouplingSpec,
    SystemParams,
    diffusion_matrix,
    drift_matrix,
    effective_coupling,
    effective_detuning,
    thermal_occupation,
)
from .classical import (  # noqa: E402
    ClassicalState,
    LimitCycle,
    Trajectory,
    classical_rhs,
    compute_limit_cycle,
    extract_limit_cycle,
    find_periodic_orbit,
    integrate_classical,
)
from .perturbative import (  # noqa: E402
    PerturbativeSolution,
    compare_with_numerical,
    evaluate,
    perturbative_coefficients,
)
from .covariance import (  # noqa: E402
    CouplingSchedule,
    integrate_covariance,
    is_stable,
    monodromy,
    periodic_steady_state,
    relaxed_steady_state,
)
from .entanglement import (  # noqa: E402
    log_negativity,
    max_entanglement_over_period,
    predict_resonances,
    symplectic_eigenvalues_pt,
)
