"""Kernel-level properties of the dual-backend linear algebra."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from goverify import arith
from goverify.arith import (ContractViolation, ExactComputationError, Inconsistent,
                            Solution, ToleranceProfile, q, qarray, qeye, qzeros)

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def matrices(max_dim=12):
    return st.integers(1, max_dim).flatmap(
        lambda n: st.integers(1, max_dim).flatmap(
            lambda m: st.lists(st.lists(small_fractions, min_size=m, max_size=m),
                               min_size=n, max_size=n)))


def test_solve_identity():
    sol = arith.solve_linear(qeye(3), qarray([1, 2, 3]))
    assert isinstance(sol, Solution)
    assert list(sol.x) == [1, 2, 3]
    assert sol.nullspace.shape == (0, 3)


def test_solve_zero_matrix():
    sol = arith.solve_linear(qzeros((2, 2)), qarray([0, 0]))
    assert isinstance(sol, Solution)
    assert list(sol.x) == [0, 0]
    assert sol.nullspace.shape == (2, 2)


def test_solve_inconsistent_rank_gap():
    # column span of the all-ones matrix misses (1, 0)
    out = arith.solve_linear(qarray([[1, 1], [1, 1]]), qarray([1, 0]))
    assert isinstance(out, Inconsistent)
    assert out.rank_a == 1 and out.rank_ab == 2


def test_rank_examples():
    assert arith.rank(qeye(4)) == 4
    assert arith.rank(qzeros((3, 3))) == 0
    assert arith.rank(qarray([[1, 2], [2, 4]])) == 1


def test_shape_mismatch_raises():
    with pytest.raises(ContractViolation):
        arith.solve_linear(qeye(3), qarray([1, 2]))


def test_float_rejected_as_scalar():
    with pytest.raises(ContractViolation):
        q(0.5)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_solvability_iff_rank_equality(rows, data):
    """Solution exists iff rank(A) equals rank of the augmented matrix."""
    a = qarray(rows)
    b = qarray(data.draw(st.lists(small_fractions, min_size=a.shape[0], max_size=a.shape[0])))
    aug = np.concatenate([a, b[:, None]], axis=1)
    out = arith.solve_linear(a, b)
    if arith.rank(a) == arith.rank(aug):
        assert isinstance(out, Solution)
        assert arith.is_zero(np.dot(a, out.x) - b)
    else:
        assert isinstance(out, Inconsistent)
        assert out.rank_a < out.rank_ab


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_nullspace_dimension_and_membership(rows):
    a = qarray(rows)
    null = arith.nullspace(a)
    assert null.shape[0] == a.shape[1] - arith.rank(a)
    if null.shape[0]:
        assert arith.is_zero(np.dot(a, null.T))
        assert arith.rank(null) == null.shape[0]


@settings(max_examples=40, deadline=None)
@given(matrices(8))
def test_backend_agreement_rank(rows):
    a = qarray(rows)
    assert arith.rank(a) == arith.rank(a, backend=arith.FLOAT)


@settings(max_examples=40, deadline=None)
@given(matrices(8), st.data())
def test_backend_agreement_solvability(rows, data):
    a = qarray(rows)
    b = qarray(data.draw(st.lists(small_fractions, min_size=a.shape[0], max_size=a.shape[0])))
    exact = arith.solve_linear(a, b)
    approx = arith.solve_linear(a, b, backend=arith.FLOAT)
    assert isinstance(exact, Solution) == isinstance(approx, Solution)


def test_nullspace_hybrid_path_matches_direct():
    # force the modular path with a tall structured system of known nullity
    rng = np.random.RandomState(11)
    base = qarray(rng.randint(-3, 4, size=(6, 40)))
    stack = np.concatenate([base * q(i + 1) for i in range(40)], axis=0)
    null = arith.nullspace_exact(stack)
    assert null.shape[0] == 40 - arith.rank_exact(base)
    assert arith.is_zero(arith.exact_matmul(stack, null.T))


# -- symmetric eigenstructure ------------------------------------------------

def test_eigenspaces_scalar_operator():
    out = arith.symmetric_eigenspaces(q(5) * qeye(4))
    assert len(out) == 1
    value, basis = out[0]
    assert value == 5 and basis.shape[0] == 4


def test_eigenspaces_diag():
    out = arith.symmetric_eigenspaces(qarray([[1, 0, 0], [0, 1, 0], [0, 0, 2]]))
    assert [(v, b.shape[0]) for v, b in out] == [(1, 2), (2, 1)]


def test_eigenspaces_respects_form():
    # operator self-adjoint for a non-trivial diagonal form
    form = qarray([[2, 0], [0, 1]])
    op = qarray([[1, 1], [2, 2]])  # form @ op symmetric; spectrum {0, 3}
    out = arith.symmetric_eigenspaces(op, form)
    assert sum(b.shape[0] for _, b in out) == 2
    for value, basis in out:
        for row in basis:
            assert arith.is_zero(np.dot(op, row) - value * row)


def test_eigenspaces_non_self_adjoint_rejected():
    with pytest.raises(ContractViolation):
        arith.symmetric_eigenspaces(qarray([[0, 1], [2, 0]]))


def test_eigenspaces_irrational_spectrum_rejected():
    with pytest.raises(ExactComputationError):
        arith.symmetric_eigenspaces(qarray([[0, 1], [1, 1]]))


def test_eigenspaces_float_clusters():
    s = np.diag([1.0, 1.0 + 1e-12, 3.0])
    out = arith.symmetric_eigenspaces(s, backend=arith.FLOAT)
    assert [b.shape[0] for _, b in out] == [2, 1]


@settings(max_examples=30, deadline=None)
@given(st.lists(small_fractions, min_size=2, max_size=6))
def test_eigenspace_reconstruction(diag_values):
    """Sum of eigenvalue times projector reproduces the operator exactly."""
    n = len(diag_values)
    s = qzeros((n, n))
    for i, v in enumerate(diag_values):
        s[i, i] = v
    out = arith.symmetric_eigenspaces(s)
    recon = qzeros((n, n))
    for value, basis in out:
        gram = np.dot(basis, basis.T)
        rows, pivots = arith._rref(np.concatenate([gram, qeye(basis.shape[0])], axis=1))
        inv = qarray([row[basis.shape[0]:] for row in rows])
        recon = recon + value * np.dot(basis.T, np.dot(inv, basis))
    assert arith.is_zero(recon - s)


def test_minimal_polynomial_and_primary_split():
    c = qarray([[0, 1], [1, 0]])
    poly = arith.minimal_polynomial_exact(c)
    assert poly.degree() == 2
    parts = arith.primary_invariant_split(c)
    assert sorted(p.shape[0] for _, p in parts) == [1, 1]
    # irrational pair stays one rational-primary component
    parts = arith.primary_invariant_split(qarray([[0, 2], [1, 0]]))
    assert len(parts) == 1 and parts[0][1].shape[0] == 2


def test_positive_definite_exact():
    assert arith.is_positive_definite_exact(qarray([[2, 1], [1, 2]]))
    assert not arith.is_positive_definite_exact(qarray([[1, 2], [2, 1]]))
    assert not arith.is_positive_definite_exact(qzeros((2, 2)))


def test_tolerance_profile_positive():
    with pytest.raises(ContractViolation):
        ToleranceProfile(rank_epsilon=0.0)


def test_rational_reconstruction_roundtrip():
    for frac in (Fraction(3, 7), Fraction(-22, 9), Fraction(12345, 67)):
        residue = frac.numerator * pow(frac.denominator, arith._P - 2, arith._P) % arith._P
        assert arith._rational_reconstruct(residue) == frac


def test_eigenspace_reconstruction_float_within_tolerance():
    rng = np.random.RandomState(3)
    raw = rng.randn(6, 6)
    s = (raw + raw.T) / 2.0
    recon = np.zeros_like(s)
    for value, basis in arith.symmetric_eigenspaces(s, backend=arith.FLOAT):
        recon += value * basis.T @ basis
    assert float(np.max(np.abs(recon - s))) <= arith.DEFAULT_TOL.residual_epsilon


def test_eigenspaces_float_with_form():
    form = np.diag([2.0, 1.0])
    op = np.array([[1.0, 1.0], [2.0, 2.0]])
    out = arith.symmetric_eigenspaces(op, form, backend=arith.FLOAT)
    values = sorted(v for v, _ in out)
    assert abs(values[0] - 0.0) < 1e-9 and abs(values[1] - 3.0) < 1e-9
