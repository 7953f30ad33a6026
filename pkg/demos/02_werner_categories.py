"""
Werner states across the hidden-variable categories
===================================================

Werner states interpolate between the maximally mixed state (eta = 0) and
the projector onto the antisymmetric subspace (eta = 1). Two thresholds in
eta split them into separable, entangled-but-unsteerable and steerable.
"""
import numpy as np

from epr_steering.measurement import reduce
from epr_steering.states import WernerSpec, werner_boundaries, werner_classify, werner_state

for d in (2, 3, 4, 5):
    lo, hi = werner_boundaries(d)
    print(f"d={d}: separable up to eta={lo:.4f}, steerable above eta={hi:.4f}")

# sweep d = 2
for eta in np.linspace(0, 1, 9):
    print(f"  eta={eta:.3f}  {werner_classify(2, eta).value}")

# the state itself: U x U invariant, maximally mixed marginals
spec = WernerSpec(3, 0.9)
rho = werner_state(spec)
print("phi =", round(spec.phi, 6))
print("marginal B is I/3:", np.allclose(reduce(rho, "B").matrix, np.eye(3) / 3))
print("lowest eigenvalue:", rho.eigenvalues()[0])
