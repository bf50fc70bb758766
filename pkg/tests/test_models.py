import numpy as np
import pytest
from hypothesis import given, strategies as st

from epatlas.errors import DimensionError, DomainError
from epatlas.jordan import jordan_structure_at
from epatlas.linalg import eigenvalues, multiset_distance, rank
from epatlas.models import (
    MODELS,
    ModelError,
    ModelSpec,
    build,
    corner,
    family,
    h222_ep,
    h222_pert,
    h222_tilde,
    h42_ep,
    h42_tilde,
    h6,
    jordan_block,
    jordan_pert,
    scaled_perturbation,
)

S3 = np.sqrt(3)

# transcribed once from the printed matrices
H222_PRINTED = np.array([
    [-5, 0, 0, 0, 0, 5],
    [0, -3, 0, 0, -3, 0],
    [0, 0, -1, 1, 0, 0],
    [0, 0, -1, 1, 0, 0],
    [0, 3, 0, 0, 3, 0],
    [-5, 0, 0, 0, 0, 5],
])
H42_PRINTED = np.array([
    [-9, 3 * S3, 0, 0, 0, 0],
    [-3 * S3, -3, 0, 0, 6, 0],
    [0, 0, -1, 1, 0, 0],
    [0, 0, -1, 1, 0, 0],
    [0, -6, 0, 0, 3, 3 * S3],
    [0, 0, 0, 0, -3 * S3, 9],
])


def test_entry_exactness():
    assert np.array_equal(h222_ep(0), H222_PRINTED)
    assert np.array_equal(h42_ep(), H42_PRINTED)
    assert np.array_equal(h222_pert(0, 1, 5), h222_ep(0))
    assert np.array_equal(h42_tilde(0), h42_ep())
    expected = H42_PRINTED.astype(complex)
    expected[4, 3] = -3 * 0.7
    assert np.array_equal(h42_tilde(0.7), expected)


def test_h6_entries_at_sample_point():
    tau, beta = 0.36, 0.25
    H = h6(tau, beta)
    r, s, q = 0.8, 3 * np.sqrt(3 * 0.64), 0.5
    assert H[0, 1] == pytest.approx(s) and H[1, 0] == pytest.approx(-s)
    assert H[1, 2] == pytest.approx(q) and H[2, 1] == pytest.approx(-q)
    assert H[2, 3] == pytest.approx(r) and H[3, 2] == pytest.approx(-r)
    assert H[1, 4] == pytest.approx(-6 * r) and H[4, 1] == pytest.approx(6 * r)
    assert np.allclose(np.diag(H), [-9, -3, -1, 1, 3, 9])


def test_h6_beta_negative_is_complex_hermitian():
    H = h6(0.5, -0.04)
    assert H[1, 2] == pytest.approx(0.2j)
    # the sqrt(beta) couplings become Hermitian: (1,2) and (2,1) are conjugates
    assert H[2, 1] == pytest.approx(np.conj(H[1, 2]))


def test_h6_domain():
    with pytest.raises(DomainError):
        h6(1.5, 0)


def test_h222_ep_examples():
    assert jordan_structure_at(h222_ep(0), 0).block_sizes == [2, 2, 2]
    assert rank(h222_ep(0)) == 3
    assert multiset_distance(eigenvalues(h222_ep(2)), [2] * 6) < 1e-9


@given(st.floats(-10, 10))
def test_shift_covariance(eps):
    assert np.allclose(h222_ep(eps), h222_ep(0) + eps * np.eye(6))
    assert multiset_distance(eigenvalues(h222_ep(eps)), eigenvalues(h222_ep(0)) + eps) < 1e-10


@given(st.floats(-1, 1))
def test_h222_pert_closed_form(b):
    k = np.array([1, 3, 5]) * np.sqrt(1 - b * b)
    ev = eigenvalues(h222_pert(0, b, 5 * b))
    assert multiset_distance(ev, np.concatenate([k, -k])) < 1e-6


@given(st.floats(-1, 1))
def test_h222_tilde_closed_form(b):
    k = np.array([1, 3, 5]) * np.sqrt(1 - b * b)
    assert multiset_distance(eigenvalues(h222_tilde(0, b)), np.concatenate([k, -k])) < 1e-6


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_h222_pert_a_part_antisymmetric(a, b, c):
    D = h222_pert(a, b, c) - h222_pert(0, b, c)
    assert np.array_equal(D, -D.T)


def test_h42_trace_and_structure():
    assert np.trace(h42_ep()) == 0
    assert jordan_structure_at(h42_ep(), 0).block_sizes == [4, 2]


@pytest.mark.parametrize("tau", [0.04, 0.25, 1.0])
def test_h6_parabolic_spectrum(tau):
    k = np.array([1, 3, 9]) * np.sqrt(tau)
    assert multiset_distance(eigenvalues(h6(tau, 0)), np.concatenate([k, -k])) < 1e-8


def test_h6_ep_structure():
    assert multiset_distance(eigenvalues(h6(0, 0)), [0] * 6) < 1e-9
    assert jordan_structure_at(h6(0, 0), 0).block_sizes == [4, 2]
    # h6(0,0) differs from h42_ep in the sign of the 6-couplings
    assert not np.allclose(h6(0, 0), h42_ep())


def test_jordan_pert_examples():
    assert np.array_equal(jordan_pert(4, 0.3, 0.0, np.ones((4, 4))), jordan_block(4, 0.3))
    g = 1e-6
    ev = eigenvalues(jordan_pert(6, 0, g, corner(6)))
    roots = g ** (1 / 6) * np.exp(2j * np.pi * np.arange(6) / 6)
    assert multiset_distance(ev, roots) < 1e-9
    assert multiset_distance(eigenvalues(jordan_pert(2, 0, 0.04, corner(2))), [0.2, -0.2]) < 1e-12
    with pytest.raises(DimensionError):
        jordan_pert(3, 0, 1, np.eye(2))


def test_scaled_perturbation():
    V = scaled_perturbation(3, 1e-4)
    assert V[1, 0] == 1 and V[2, 1] == 1 and V[2, 0] == pytest.approx(1e-2)
    assert np.count_nonzero(np.triu(V)) == 0
    F = scaled_perturbation(3, 1e-4, exponents_mode="flat")
    assert F[2, 0] == 1
    V = scaled_perturbation(3, 0.25, {(2, 0): 4.0})
    assert V[2, 0] == pytest.approx(2.0) and V[1, 0] == 0
    with pytest.raises(ValueError):
        scaled_perturbation(3, 0.0)


def test_flat_mode_goes_complex():
    """lambda^3 - 2 g lambda - g: the g term dominates as g -> 0."""
    worst = []
    for g in (1e-1, 1e-2, 1e-3, 1e-4):
        V = scaled_perturbation(3, g, exponents_mode="flat")
        ev = np.linalg.eigvals(jordan_pert(3, 0, g, V))
        worst.append(np.max(np.abs(ev.imag)))
    assert worst[-1] > 1e-3


def test_build_and_registry():
    assert set(MODELS) == {"h222_ep", "h222_pert", "h222_tilde", "h42_ep", "h6", "h42_tilde", "jordan_pert"}
    assert np.array_equal(build("h6", {"tau": 0.25, "beta": 0}), h6(0.25, 0))
    assert np.array_equal(build("h222_ep"), h222_ep(0))
    assert np.array_equal(build("jordan_pert", {"N": 3, "g": 0.5}), jordan_pert(3, 0, 0.5, corner(3)))
    with pytest.raises(ModelError, match=r"expected \['tau', 'beta'\]"):
        build("h6", {"tau": 0.1, "gamma": 1})
    with pytest.raises(ModelError, match="missing"):
        build("h6", {"tau": 0.1})
    with pytest.raises(ModelError):
        build("nope")
    with pytest.raises(ModelError):
        build("h6", {"tau": float("nan"), "beta": 0})


def test_family_and_spec():
    f = family("h222_pert", "b", {"a": 0.0}, {"c": lambda b: 5 * b})
    assert np.array_equal(f(1.0), h222_ep(0))
    spec = ModelSpec("h6", {"beta": 0.0})
    assert spec.free_parameters() == ["tau"]
    assert np.array_equal(spec.family()(0.25), h6(0.25, 0))
    assert np.array_equal(spec.matrix(tau=0.5), h6(0.5, 0))
    with pytest.raises(ModelError):
        ModelSpec("h6", {"zeta": 1})
    with pytest.raises(ModelError):
        ModelSpec("h6").family()
