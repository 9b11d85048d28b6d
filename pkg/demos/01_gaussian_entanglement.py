# # Entanglement of two-mode Gaussian states
#
# The covariance matrix V of (q, p, x, y) fixes everything about a
# zero-mean Gaussian state.  Vacuum has V = I/2.

# ## Imports

import numpy as np

from optomech.entanglement import log_negativity, symplectic_eigenvalues, symplectic_eigenvalues_pt

# ## Vacuum and thermal states are separable

print(log_negativity(0.5 * np.eye(4)))
print(log_negativity(np.diag([2000.5, 2000.5, 0.5, 0.5])))

# ## Two-mode squeezed vacuum
#
# Squeezing parameter r gives E_N = 2r in natural-log units.

def two_mode_squeezed(r):
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    Z = np.diag([1.0, -1.0])
    return 0.5 * np.block([[c * np.eye(2), s * Z], [s * Z, c * np.eye(2)]])

for r in (0.25, 0.5, 1.0):
    V = two_mode_squeezed(r)
    print(r, symplectic_eigenvalues_pt(V), log_negativity(V))

# the untransposed spectrum stays at the vacuum value: the state is pure
symplectic_eigenvalues(two_mode_squeezed(0.5))

# ## Thermal noise washes entanglement out

V = two_mode_squeezed(0.5)
for n in (0.0, 0.1, 0.5, 1.0):
    print(n, log_negativity(V + n * np.eye(4)))

# ## Stacks of covariance matrices are handled in one call

stack = np.stack([two_mode_squeezed(r) for r in np.linspace(0, 1, 5)])
log_negativity(stack)
