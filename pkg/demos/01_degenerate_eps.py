"""Degenerate exceptional points of the built-in six-state models.

Walks through the Jordan structure of each model at its exceptional point,
checks the printed transition matrices and shows how a one-entry
perturbation changes the EP type.  Run with ``python3 demos/01_degenerate_eps.py``.
"""

import numpy as np

from epatlas import (
    CanonicalJordanSpec,
    build_canonical_jordan,
    ep_classify,
    h6,
    h42_ep,
    h42_tilde,
    h222_ep,
    rank,
    solve_transition,
    verify_transition,
)
from epatlas.fixtures import Q_H42, q_h42_tilde

np.set_printoptions(precision=3, suppress=True, linewidth=110)

# Every built-in EP matrix has a single six-fold eigenvalue at zero, but the
# number of Jordan blocks (the geometric multiplicity) differs.
for name, H in [("h222_ep(0)", h222_ep(0)), ("h42_ep", h42_ep()), ("h6(0, 0)", h6(0, 0)),
                ("h42_tilde(1)", h42_tilde(1.0))]:
    (s,) = ep_classify(H).structures
    print(f"{name:14s} eta={s.eigenvalue.real:+.1e}  blocks={s.block_sizes}  weyr={s.weyr}")

# The rank sequence of H^k determines the blocks; for h42_ep it is 4, 2, 1, 0.
# H^4 is zero only up to rounding, so its rank must be judged against
# ||H||^4 rather than against its own (tiny) norm, which is what
# numpy.linalg.matrix_rank does.
H = h42_ep()
scale = np.linalg.norm(H)
powers = [np.linalg.matrix_power(H, k) for k in range(1, 5)]
print("\nranks of h42_ep^k:", [rank(P, scale=scale**k) for k, P in enumerate(powers, start=1)])
print("numpy matrix_rank:", [int(np.linalg.matrix_rank(P)) for P in powers])

# Printed transition matrix: H Q = Q J with J the canonical EP4+EP2 form.
J42 = build_canonical_jordan(CanonicalJordanSpec(0.0, (4, 2)))
check = verify_transition(H, Q_H42, J42)
print(f"printed Q: residual {check['residual']:.1e}, det {check['det_Q'].real:.0f}")

# A Q can also be computed from scratch by building Jordan chains.
sol = solve_transition(H, CanonicalJordanSpec(0.0, (4, 2)))
print(f"computed Q: residual {sol.residual:.1e}, invertible {sol.invertible}")

# One extra entry -3*gamma merges the two blocks into a single EP6, for any
# gamma != 0, and the printed Q(gamma) has determinant 19131876 gamma^4.
J6 = build_canonical_jordan(CanonicalJordanSpec(0.0, (6,)))
print("\n gamma  blocks   det Q(gamma) / gamma^4")
for gamma in (0.0, 0.5, 1.0, 2.0):
    blocks = ep_classify(h42_tilde(gamma)).structures[0].block_sizes
    ratio = (verify_transition(h42_tilde(gamma), q_h42_tilde(gamma), J6)["det_Q"].real / gamma**4
             if gamma else float("nan"))
    print(f"{gamma:6.1f}  {str(blocks):8s} {ratio:.1f}")
