"""How perturbations unfold a Jordan block, and when the spectrum stays real.

A corner perturbation g of an m x m Jordan block splits the eigenvalue into
m points on a circle of radius g^(1/m).  Random perturbations of J^(6) almost
never keep the spectrum real; a graded perturbation whose k-th subdiagonal
scales like g^((k-1)/2) can.  Run with ``python3 demos/03_unfolding_and_reality.py``.
"""

import numpy as np

from epatlas import corner, jordan_pert, reality_experiment, scaled_perturbation, unfolding_exponent
from epatlas.linalg import eigenvalues

g_values = [10.0 ** -k for k in range(3, 10)]
print(" m   fitted exponent   1/m")
for m in (2, 3, 4, 6):
    fit = unfolding_exponent(lambda g, m=m: jordan_pert(m, 0, g, corner(m)), 0.0, g_values)
    print(f"{m:2d}   {fit.exponent:.5f}           {1 / m:.5f}")

print("\nsix eigenvalues of J6 + 1e-6 corner:")
print(np.round(eigenvalues(jordan_pert(6, 0, 1e-6, corner(6))), 4))

generic = reality_experiment(6, "generic", g_values=[1e-2, 1e-4, 1e-6], trials=100, seed=1)
print("\nreal-spectrum fraction, random V, N=6:", generic.fraction_real_per_g)

# N=3: graded prefactors all equal to one keep the spectrum real, since the
# rescaled characteristic polynomial mu^3 - 2 mu - 1 has three real roots.
# Without the grading the sub-subdiagonal term dominates and the roots turn complex.
ones = {(1, 0): 1.0, (1, 1): 1.0, (2, 0): 1.0}
for mode in ("lemma2", "flat"):
    rep = reality_experiment(3, mode, prefactors=ones, g_values=[1e-2, 1e-4, 1e-6], trials=1)
    print(f"{mode:6s} N=3 all-real per g:", rep.fraction_real_per_g)
print("\ngraded V at g=1e-4:\n", scaled_perturbation(3, 1e-4, ones).real)
