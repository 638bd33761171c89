"""Metric operators: construction, equivariance, isometry subalgebra,
bi-invariance and the naturally reductive normal form."""

from fractions import Fraction

import numpy as np
import pytest

from goverify import arith, metrics
from goverify.arith import is_zero, q, qarray, qeye
from goverify.lie import build_classical, embed_so_partition
from goverify.metrics import (BlockSpec, MetricOperator, bi_invariance_check,
                              dazi_structure_check, equivariance_check,
                              invariant_subspace, isometry_subalgebra,
                              metric_from_blocks, restrict_operator)
from goverify.subspaces import Subspace, ideal_decomposition, orthogonal_complement

PARAM_NAMES = ["k1", "k2", "k3", "m1_2", "m1_3", "m2_3"]


@pytest.fixture(scope="module")
def so6():
    layout = embed_so_partition(6, (2, 2, 2))
    return layout, layout.named_subspaces()


def block_metric(layout, named, params):
    blocks = tuple((named[n], Fraction(p)) for n, p in zip(PARAM_NAMES, params))
    return metric_from_blocks(layout.algebra, BlockSpec(blocks))


def test_scalar_metric_is_identity_scaled(so6):
    layout, named = so6
    op = block_metric(layout, named, [3, 3, 3, 3, 3, 3])
    assert is_zero(op.matrix - q(3) * qeye(15))
    assert op.is_scalar() == 3


def test_eigenvalue_multiplicities_from_blocks(so6):
    layout, named = so6
    op = block_metric(layout, named, [1, 2, 3, 4, 5, 6])
    assert [(v, s.dim) for v, s in op.eigenspaces] == \
        [(1, 1), (2, 1), (3, 1), (4, 4), (5, 4), (6, 4)]


def test_blocks_must_be_positive(so6):
    layout, named = so6
    with pytest.raises(arith.ContractViolation):
        block_metric(layout, named, [1, 2, 3, 4, 5, 0])


def test_blocks_must_span(so6):
    layout, named = so6
    blocks = tuple((named[n], Fraction(1)) for n in PARAM_NAMES[:3])
    with pytest.raises(arith.ContractViolation):
        metric_from_blocks(layout.algebra, BlockSpec(blocks))


def test_blocks_must_not_overlap(so6):
    layout, named = so6
    blocks = tuple((named[n], Fraction(1)) for n in PARAM_NAMES) + ((named["k1"], Fraction(2)),)
    with pytest.raises(arith.ContractViolation):
        metric_from_blocks(layout.algebra, BlockSpec(blocks))


def test_metric_operator_invariants(so6):
    layout, named = so6
    op = block_metric(layout, named, [1, 2, 3, 4, 5, 6])
    g = layout.algebra
    h = op.metric_matrix
    assert is_zero(h - h.T)
    assert arith.is_positive_definite_exact(h)
    # metric inner product against Q(L., .) on sampled vectors
    x = g.basis_vector(3)
    y = g.basis_vector(7)
    assert op.metric_inner(x, y) == g.form().inner(op.apply(x), y)


def test_equivariance_over_defining_torus(so6):
    layout, named = so6
    op = block_metric(layout, named, [1, 2, 3, 4, 5, 6])
    assert equivariance_check(op, layout.subalgebra)
    full = Subspace.full(layout.algebra)
    result = equivariance_check(op, full)
    assert not result and result.witness_index is not None
    assert equivariance_check(op, full, backend=arith.FLOAT).ok is False
    scalar = block_metric(layout, named, [2, 2, 2, 2, 2, 2])
    assert equivariance_check(scalar, full)


def test_isometry_subalgebra_branches(so6):
    layout, named = so6
    # all distinct: exactly the torus
    op = block_metric(layout, named, [1, 2, 3, 4, 5, 6])
    assert isometry_subalgebra(op).spans_equal(layout.subalgebra)
    # x1=x2=x4, x5=x6: contains the merged block so(4) + so(2)
    op2 = block_metric(layout, named, [2, 2, 7, 2, 3, 3])
    kp = isometry_subalgebra(op2)
    assert kp.dim == 7
    merged = embed_so_partition(layout.algebra, (4, 2))
    assert kp.spans_equal(merged.subalgebra)
    # all equal: everything
    op3 = block_metric(layout, named, [5, 5, 5, 5, 5, 5])
    assert isometry_subalgebra(op3).dim == 15


def test_isometry_subalgebra_contains_equivariant_skew_subalgebras(so6):
    layout, named = so6
    op = block_metric(layout, named, [2, 2, 7, 2, 3, 3])
    kp = isometry_subalgebra(op)
    assert kp.contains_space(layout.subalgebra)
    assert equivariance_check(op, kp)
    # eigenspaces of the operator are invariant under the isometry subalgebra
    for _value, space in op.eigenspaces:
        for i in range(kp.dim):
            image = arith.exact_matmul(kp.ad_matrices[i], space.basis.T)
            assert space.coords_matrix(image) is not None


def test_restrict_operator_and_invariance(so6):
    layout, named = so6
    op = block_metric(layout, named, [1, 2, 3, 4, 5, 6])
    k = layout.subalgebra
    assert invariant_subspace(op, k)
    block = restrict_operator(op, k)
    assert [block[i, i] for i in range(3)] == [1, 2, 3]
    with pytest.raises(arith.ContractViolation):
        restrict_operator(op, Subspace(layout.algebra,
                                       qarray([[1] + [0] * 13 + [1]])))


def test_bi_invariance_on_so4():
    so4 = build_classical("so", 4)
    full = Subspace.full(so4)
    dec = ideal_decomposition(full)
    blocks = tuple(zip(dec.ideals, (Fraction(2), Fraction(3))))
    op = metric_from_blocks(so4, BlockSpec(blocks))
    report = bi_invariance_check(op, full)
    assert report and sorted(report.ideal_scalars) == [2, 3]
    # identity restriction is bi-invariant
    one = metric_from_blocks(so4, BlockSpec(((full, Fraction(1)),)))
    assert bi_invariance_check(one, full)


def test_bi_invariance_fails_for_ideal_mixing():
    so4 = build_classical("so", 4)
    full = Subspace.full(so4)
    dec = ideal_decomposition(full)
    i1, i2 = dec.ideals
    # a rotation coupling the two ideals: symmetric for Q but not ideal-diagonal
    basis = np.concatenate([i1.basis, i2.basis], axis=0)
    cols = basis.T
    rows, pivots = arith._rref(np.concatenate([cols, qeye(6)], axis=1))
    cols_inv = qarray([row[6:] for row in rows])
    mix = qeye(6) * q(2)
    mix[0, 3] = mix[3, 0] = q(1)
    matrix = arith.exact_matmul(arith.exact_matmul(cols, mix), cols_inv)
    op = MetricOperator(so4, matrix)
    assert not bi_invariance_check(op, full)


# -- normal form recognition -----------------------------------------------------

def test_dazi_scalar_is_bi_invariant(so6):
    layout, named = so6
    op = block_metric(layout, named, [4, 4, 4, 4, 4, 4])
    report = dazi_structure_check(op)
    assert report.verdict and "bi-invariant" in report.reason


def test_dazi_branch_table(so6):
    layout, named = so6
    # distinct parameters: not naturally reductive
    assert not dazi_structure_check(block_metric(layout, named, [1, 2, 3, 4, 5, 6]))
    # merged branch: k' = so(4) + so(2), scalars (a, a), complement scalar lam
    report = dazi_structure_check(block_metric(layout, named, [2, 2, 7, 2, 3, 3]))
    assert report.verdict
    assert report.isometry_subalgebra.dim == 7
    assert report.decomposition.center.dim == 1
    assert sorted(report.ideal_scalars) == [2, 2]
    assert report.complement_scalar == 3
    # center-flexible branch: torus block arbitrary, single complement scalar
    report2 = dazi_structure_check(block_metric(layout, named, [1, 2, 3, 4, 4, 4]))
    assert report2.verdict
    assert report2.isometry_subalgebra.dim == 3
    assert report2.complement_scalar == 4


def test_dazi_scaling_invariance(so6):
    layout, named = so6
    for params in ([1, 2, 3, 4, 5, 6], [2, 2, 7, 2, 3, 3]):
        op = block_metric(layout, named, params)
        scaled = op.rescale(Fraction(7, 3))
        assert dazi_structure_check(op).verdict == dazi_structure_check(scaled).verdict


def test_dazi_requires_simple_ambient():
    so4 = build_classical("so", 4)  # not simple
    op = metric_from_blocks(so4, BlockSpec(((Subspace.full(so4), Fraction(1)),)))
    with pytest.raises(arith.ContractViolation):
        dazi_structure_check(op)


def test_center_block_inner_product_convention():
    """A free center block is an inner product; the operator block follows
    from the center's Gram matrix and stays self-adjoint."""
    su3 = build_classical("su", 3)
    idx = [i for i, lab in enumerate(su3.labels) if lab.startswith("D")]
    torus = Subspace.from_indices(su3, idx)
    from goverify import reps
    m = orthogonal_complement(torus, su3.form())
    pieces = reps.isotypic_decomposition(torus, m).components
    inner = qarray([[2, 1], [1, 3]])
    spec = BlockSpec(tuple((p, Fraction(5)) for p in pieces), (torus, inner))
    op = metric_from_blocks(su3, spec)
    block = restrict_operator(op, torus)
    gram = torus.gram(su3.form())
    assert is_zero(arith.exact_matmul(gram, block) - inner)
