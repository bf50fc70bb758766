"""Transition matrices derived by hand for the built-in EP models.

They satisfy H Q = Q J exactly (in exact arithmetic) and serve as
reference solutions; any other invertible Q mixing them with a matrix that
commutes with J is equally valid.
"""

import numpy as np

SQRT3 = np.sqrt(3.0)

#: Q for h222_ep(0) with J = J^(2+2+2)(0)
Q_H222 = np.array(
    [
        [-5, 1, 0, 0, 0, 0],
        [-3, 0, -3, 0, -3, 0],
        [-1, 1, -1, 1, 0, 0],
        [-1, 0, -1, 0, 0, 0],
        [3, 1, 3, 1, 3, 1],
        [-5, 0, 0, 0, 0, 0],
    ],
    dtype=complex,
)

#: Q for h42_ep() with J = J^(4+2)(0); det Q = 26244
Q_H42 = np.array(
    [
        [-162, 54, -9, 1, 0, 0],
        [-162 * SQRT3, 36 * SQRT3, -3 * SQRT3, 0, 0, 0],
        [0, 0, -1, 1, -1, 1],
        [0, 0, -1, 0, -1, 0],
        [-162 * SQRT3, 18 * SQRT3, 0, 0, 0, 0],
        [-162, 0, 0, 0, 0, 0],
    ],
    dtype=complex,
)

DET_Q_H42 = 26244.0
DET_Q_H42_TILDE_COEFF = 19131876.0


def q_h42_tilde(gamma: float) -> np.ndarray:
    """Q(gamma) for h42_tilde(gamma) with J = J^(6)(0); det Q = 19131876 gamma^4."""
    g = gamma
    s = SQRT3
    return np.array(
        [
            [-486 * s * g, 54 * s * g, 9 * s * g, -3 * s * g, s * g / 2, -s * g / 18],
            [-1458 * g, 0, 45 * g, -6 * g, g / 2, 0],
            [0, 0, 0, 0, -1, 1],
            [0, 0, 0, 0, -1, 0],
            [-1458 * g, -162 * g, 36 * g, 0, 0, 0],
            [-486 * s * g, -108 * s * g, 0, 0, 0, 0],
        ],
        dtype=complex,
    )
