"""The physical parameter domain of the two-parameter h6 family.

The secular equation of h6 is a cubic in s = E^2, so the spectrum is real
exactly when all three roots s are real and non-negative.  This script maps
that region, locates the EP at its boundary and shows the metric operator
degrading as the EP is approached.  Run with ``python3 demos/02_unitary_corridor.py``.
"""

import numpy as np

from epatlas import (
    cardano_roots,
    classify_point,
    construct_positive_metric,
    family,
    h6,
    h222_pert,
    locate_ep_1d,
    metric_condition,
)
from epatlas.linalg import eigenvalues

# Closed form versus the eigensolver at one interior point.
tau, beta = 0.25, 0.01
print("secular roots s:", np.round(cardano_roots(tau, beta).s.real, 6))
print("eigenvalues^2  :", np.round(np.sort(eigenvalues(h6(tau, beta)).real ** 2), 6))

# Unitarity map: '#' marks points with a real, non-negative root triple.
taus = np.linspace(-0.2, 1.0, 25)
betas = np.linspace(-0.5, 0.5, 41)
print("\nbeta ->  (rows: tau from -0.2 to 1.0)")
for t in taus:
    row = "".join("#" if classify_point(t, b).unitary else "." for b in betas)
    print(f"{t:+.2f} {row}")

# Along beta = 0 the domain ends at tau = 0, where all six levels merge.
loc = locate_ep_1d(family("h6", "tau", {"beta": 0.0}), (-0.5, 0.5))
print(f"\nEP at tau = {loc.param_value:.2e} ({loc.method}), blocks {loc.jordan[0].block_sizes}")

# Inside the domain a positive metric exists, but its condition number grows
# without bound towards the EP, here for h222_pert along c = 5b.
print("\n   b     cond(Theta)")
for b in (0.5, 0.9, 0.99, 0.999):
    theta = construct_positive_metric(h222_pert(0, b, 5 * b)).chosen_theta
    print(f"{b:6.3f}  {metric_condition(theta):.3e}")
