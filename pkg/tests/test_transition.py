import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_invertible
from epatlas.errors import DimensionError, SpecMismatchError
from epatlas.fixtures import DET_Q_H42, DET_Q_H42_TILDE_COEFF, Q_H222, Q_H42, q_h42_tilde
from epatlas.models import h222_ep, h42_ep, h42_tilde, h6
from epatlas.transition import (
    CanonicalJordanSpec,
    build_canonical_jordan,
    solve_transition,
    verify_transition,
)


def J(blocks, eta=0.0):
    return build_canonical_jordan(CanonicalJordanSpec(eta, tuple(blocks)))


def test_canonical_shapes():
    eta = 0.7
    J6 = J([6], eta)
    assert np.allclose(np.diag(J6), eta) and np.allclose(np.diag(J6, 1), 1)
    J42 = J([4, 2], eta)
    assert np.allclose(np.diag(J42, 1), [1, 1, 1, 0, 1])
    J222 = J([2, 2, 2], eta)
    assert np.allclose(np.diag(J222, 1), [1, 0, 1, 0, 1])
    assert np.count_nonzero(J222 - np.diag(np.diag(J222))) == 3


def test_spec_validation():
    with pytest.raises(ValueError):
        CanonicalJordanSpec(0, ())
    with pytest.raises(ValueError):
        CanonicalJordanSpec(0, (2, 0))


def test_identity_admissible():
    H = J([2, 2, 2])
    check = verify_transition(H, np.eye(6), H)
    assert check["residual"] == 0 and check["invertible"]
    sol = solve_transition(H, CanonicalJordanSpec(0, (2, 2, 2)))
    assert sol.residual < 1e-12 and sol.invertible


def test_printed_q_h222():
    check = verify_transition(h222_ep(0), Q_H222, J([2, 2, 2]))
    assert check["residual"] == 0.0
    assert check["invertible"]


def test_printed_q_h42():
    check = verify_transition(h42_ep(), Q_H42, J([4, 2]))
    assert check["residual"] < 1e-12
    assert check["det_Q"].real == pytest.approx(DET_Q_H42, rel=1e-8)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_printed_q_h42_tilde(gamma):
    check = verify_transition(h42_tilde(gamma), q_h42_tilde(gamma), J([6]))
    assert check["residual"] < 1e-12
    assert check["det_Q"].real == pytest.approx(DET_Q_H42_TILDE_COEFF * gamma**4, rel=1e-8)
    ratio = verify_transition(h42_tilde(2 * gamma), q_h42_tilde(2 * gamma), J([6]))["det_Q"] / check["det_Q"]
    assert ratio.real == pytest.approx(16, rel=1e-10)


def test_gamma_two_determinant():
    d = verify_transition(h42_tilde(2.0), q_h42_tilde(2.0), J([6]))["det_Q"]
    assert d.real == pytest.approx(306110016, rel=1e-8)


@pytest.mark.parametrize(
    "H, blocks",
    [(h222_ep(0), [2, 2, 2]), (h42_ep(), [4, 2]), (h42_tilde(2.0), [6]), (h42_tilde(0.5), [6]), (h6(0, 0), [4, 2])],
)
def test_solve_transition_models(H, blocks):
    sol = solve_transition(H, CanonicalJordanSpec(0, tuple(blocks)))
    assert sol.residual < 1e-9
    assert sol.invertible
    assert np.allclose(sol.J, J(blocks))


def test_spec_mismatch():
    with pytest.raises(SpecMismatchError):
        solve_transition(h42_ep(), CanonicalJordanSpec(0, (2, 2, 2)))
    with pytest.raises(DimensionError):
        solve_transition(h42_ep(), CanonicalJordanSpec(0, (2, 2)))


def test_verify_dimension_mismatch():
    with pytest.raises(DimensionError):
        verify_transition(np.eye(2), np.eye(3), np.eye(2))


partitions = st.lists(st.integers(1, 4), min_size=1, max_size=4).filter(lambda b: sum(b) <= 8)


@given(partitions, st.integers(0, 2**31))
def test_round_trip(blocks, seed):
    rng = np.random.default_rng(seed)
    eta = complex(rng.uniform(-2, 2))
    Jm = J(blocks, eta)
    S = random_invertible(rng, Jm.shape[0])
    H = S @ Jm @ np.linalg.inv(S)
    sol = solve_transition(H, CanonicalJordanSpec(eta, tuple(blocks)))
    assert sol.residual < 1e-8 and sol.invertible
    back = np.linalg.solve(sol.Q, H @ sol.Q)
    assert np.max(np.abs(back - Jm)) < 1e-7


@given(st.floats(0.5, 3), st.floats(0.5, 3),
       st.lists(st.complex_numbers(max_magnitude=1), min_size=4, max_size=4))
def test_commutant_mixing(a0, b0, rest):
    """Q T is valid for block-respecting upper-triangular Toeplitz T."""
    a = [a0] + rest[:3]
    b = [b0, rest[3]]
    T = np.zeros((6, 6), dtype=complex)
    for k in range(4):
        T[np.arange(4 - k), np.arange(k, 4)] = a[k]
    for k in range(2):
        T[4 + np.arange(2 - k), 4 + np.arange(k, 2)] = b[k]
    check = verify_transition(h42_ep(), Q_H42 @ T, J([4, 2]))
    assert check["residual"] < 1e-12
    assert check["invertible"]
