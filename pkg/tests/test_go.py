"""Geodesic-orbit machinery: witness solves, verdicts, certificates,
the trilinear condition, normalizer equivariance, and splitting."""

import random
from fractions import Fraction

import numpy as np
import pytest

from goverify import arith, go, metrics
from goverify.arith import is_zero, q, qarray
from goverify.go import (GoCertificate, SamplingStrategy, Unsolvable,
                         geodesic_lemma_solvable, go_solve_at, go_verdict,
                         natred_condition_check, normalizer_equivariance_check,
                         replay_certificate, replay_counterexample, split_check,
                         two_step_identity_check)
from goverify.lie import build_classical, direct_sum, embed_so_partition, attach_form
from goverify.metrics import BlockSpec, isometry_subalgebra, metric_from_blocks
from goverify.subspaces import Subspace, orthogonal_complement

PARAM_NAMES = ["k1", "k2", "k3", "m1_2", "m1_3", "m2_3"]
STRATEGY = SamplingStrategy(seed=11, random_count=16)


@pytest.fixture(scope="module")
def so6():
    layout = embed_so_partition(6, (2, 2, 2))
    return layout, layout.named_subspaces()


def block_metric(layout, named, params):
    blocks = tuple((named[n], Fraction(p)) for n, p in zip(PARAM_NAMES, params))
    return metric_from_blocks(layout.algebra, BlockSpec(blocks))


def test_scalar_metric_zero_witness(so6):
    layout, named = so6
    op = block_metric(layout, named, [2] * 6)
    k = layout.subalgebra
    for i in range(layout.algebra.dim):
        result = go_solve_at(op, k, layout.algebra.basis_vector(i))
        assert isinstance(result, GoCertificate)
        assert is_zero(result.witness)


def test_solvable_along_dazi_form_every_sample(so6):
    """Normal-form metrics admit witnesses at every sampled direction,
    relative to their own defining subalgebra."""
    layout, named = so6
    op = block_metric(layout, named, [2, 2, 7, 2, 3, 3])
    merged = embed_so_partition(layout.algebra, (4, 2)).subalgebra
    verdict = go_verdict(op, merged, STRATEGY, keep_certificates=True)
    assert not verdict.disproved
    assert all(replay_certificate(op, c, merged) for c in verdict.certificates)


def test_unsolvable_direction_two_block_sum(so6):
    """Generic sums across two coupling blocks with distinct eigenvalues defeat
    the witness system for the distinct-parameter metric."""
    layout, named = so6
    op = block_metric(layout, named, [1, 2, 3, 4, 5, 6])
    k = layout.subalgebra
    rng = random.Random(3)
    v4 = layout.offdiag_blocks[(1, 2)].random_element(rng)
    v5 = layout.offdiag_blocks[(1, 3)].random_element(rng)
    result = go_solve_at(op, k, v4 + v5)
    assert isinstance(result, Unsolvable)
    assert result.rank_a < result.rank_ab
    assert replay_counterexample(op, k, result)


def test_witness_minimal_norm_deterministic(so6):
    layout, named = so6
    op = block_metric(layout, named, [2, 2, 7, 2, 3, 3])
    merged = embed_so_partition(layout.algebra, (4, 2)).subalgebra
    rng = random.Random(9)
    x = Subspace.full(layout.algebra).random_element(rng)
    first = go_solve_at(op, merged, x)
    second = go_solve_at(op, merged, x)
    assert isinstance(first, GoCertificate)
    assert is_zero(first.witness - second.witness)


def test_equivariance_precondition_enforced(so6):
    layout, named = so6
    op = block_metric(layout, named, [1, 2, 3, 4, 5, 6])
    full = Subspace.full(layout.algebra)
    with pytest.raises(arith.ContractViolation):
        go_solve_at(op, full, layout.algebra.basis_vector(0))


def test_go_verdict_disproved_and_replay(so6):
    layout, named = so6
    op = block_metric(layout, named, [1, 2, 3, 4, 5, 6])
    verdict = go_verdict(op, layout.subalgebra, STRATEGY)
    assert verdict.disproved
    assert verdict.counterexample_label.startswith("pair:")
    assert replay_counterexample(op, layout.subalgebra, verdict.counterexample)


def test_go_verdict_float_escalates_to_exact(so6):
    layout, named = so6
    op = block_metric(layout, named, [1, 2, 3, 4, 5, 6])
    verdict = go_verdict(op, layout.subalgebra, STRATEGY, backend=arith.FLOAT)
    assert verdict.disproved
    # the counterexample is still an exact rank-gap certificate
    assert replay_counterexample(op, layout.subalgebra, verdict.counterexample)


def test_eigenspace_pair_completeness(so6):
    """Whenever some direction disproves, a two-piece sum already does."""
    layout, named = so6
    for params in ([1, 2, 3, 4, 5, 6], [2, 2, 7, 2, 3, 4], [1, 1, 1, 2, 3, 4]):
        op = block_metric(layout, named, params)
        kp = isometry_subalgebra(op)
        full = go_verdict(op, kp, STRATEGY)
        pairs_only = go_verdict(op, kp, SamplingStrategy(seed=11, random_count=0,
                                                         basis_vectors=False))
        assert full.disproved == pairs_only.disproved


# -- trilinear condition -----------------------------------------------------------

def test_natred_scalar_metric_any_reductive_complement(so6):
    layout, named = so6
    op = block_metric(layout, named, [3] * 6)
    k = layout.subalgebra
    m = orthogonal_complement(k, layout.algebra.form())
    assert natred_condition_check(op, k, m)


def test_natred_dazi_form_true_for_defining_subalgebra(so6):
    layout, named = so6
    op = block_metric(layout, named, [2, 2, 7, 2, 3, 3])
    merged = embed_so_partition(layout.algebra, (4, 2)).subalgebra
    m = orthogonal_complement(merged, layout.algebra.form())
    assert natred_condition_check(op, merged, m)


def test_natred_fails_with_witness_triple(so6):
    layout, named = so6
    op = block_metric(layout, named, [1, 2, 3, 4, 5, 6])
    k = layout.subalgebra
    m = orthogonal_complement(k, layout.algebra.form())
    result = natred_condition_check(op, k, m)
    assert not result and result.witness_triple is not None
    float_result = natred_condition_check(op, k, m, backend=arith.FLOAT)
    assert not float_result


def test_natred_requires_reductive_complement(so6):
    layout, named = so6
    op = block_metric(layout, named, [3] * 6)
    k = layout.subalgebra
    bad = Subspace.from_indices(layout.algebra, list(range(3, 15)))
    # replace a complement direction so [k, m] escapes
    with pytest.raises(arith.ContractViolation):
        natred_condition_check(op, layout.offdiag_blocks[(1, 2)], bad)


# -- normalizer equivariance and the two-step identity ------------------------------

def test_normalizer_equivariance_self_normalizing(so6):
    layout, named = so6
    op = block_metric(layout, named, [2, 2, 7, 2, 3, 3])
    report = normalizer_equivariance_check(op, layout.subalgebra)
    assert report.ok
    assert report.flags.self_normalizing and not report.flags.semisimple
    assert report.normalizer_dim == 3


def test_normalizer_equivariance_contrapositive():
    """A metric equivariant over one so(3) ideal of so(4) inside a product
    algebra, but not over its normalizer, is disproved by the witness sweep."""
    g = direct_sum([build_classical("so", 4), build_classical("so", 3)])
    attach_form(g, -g.killing.matrix)
    from goverify.subspaces import ideal_decomposition
    so4_block = Subspace.from_indices(g, range(6))
    dec = ideal_decomposition(so4_block)
    k = dec.ideals[0]
    other = dec.ideals[1]
    tail = Subspace.from_indices(g, range(6, 9))
    blocks = ((k, Fraction(1)), (other, Fraction(2)), (tail, Fraction(3)))
    op = metric_from_blocks(g, BlockSpec(blocks))
    assert metrics.equivariance_check(op, k)
    report = normalizer_equivariance_check(op, k)
    assert report.flags.semisimple
    # normalizer of one ideal contains the other; scalar blocks keep it equivariant
    assert report.ok
    # now mix the OTHER ideal's block so normalizer-equivariance fails
    mix = qarray([[2, 0, 0], [0, 2, 1], [0, 1, 2]])
    spec = BlockSpec(((k, Fraction(1)), (tail, Fraction(3))), (other, mix))
    op2 = metric_from_blocks(g, spec)
    assert metrics.equivariance_check(op2, k)
    report2 = normalizer_equivariance_check(op2, k)
    assert not report2.ok
    verdict = go_verdict(op2, k, STRATEGY)
    assert verdict.disproved


def test_two_step_identity(so6):
    layout, named = so6
    g = layout.algebra
    # W = 0 reduces both expressions to [Z, LZ]: zero for a scalar operator
    op = block_metric(layout, named, [2] * 6)
    rng = random.Random(1)
    z = Subspace.full(g).random_element(rng)
    assert two_step_identity_check(op, layout.subalgebra, z, qarray([0] * 15))
    # commuting pair: both expressions vanish (bi-invariant case)
    w = layout.subalgebra.basis[0]
    z_comm = w * q(3)
    assert two_step_identity_check(op, layout.subalgebra, z_comm, w)
    # non-commuting pair: both expressions are nonzero together, never split
    w2 = layout.subalgebra.random_element(rng)
    z2 = Subspace.full(g).random_element(rng)
    two_step_identity_check(op, layout.subalgebra, z2, w2)  # must not raise
    # replayed witness from the solver satisfies the identity with X = Z - W
    op2 = block_metric(layout, named, [2, 2, 7, 2, 3, 3])
    merged = embed_so_partition(g, (4, 2)).subalgebra
    x = Subspace.full(g).random_element(rng)
    cert = go_solve_at(op2, merged, x)
    assert isinstance(cert, GoCertificate)
    assert two_step_identity_check(op2, merged, x + cert.witness, cert.witness)


def test_geodesic_lemma_route_agrees_with_witness_route(so6):
    """Projected and unprojected formulations agree on sampled directions."""
    layout, named = so6
    g = layout.algebra
    rng = random.Random(23)
    for params, k in ((([2, 2, 7, 2, 3, 3]), embed_so_partition(g, (4, 2)).subalgebra),
                      (([1, 2, 3, 4, 5, 6]), layout.subalgebra)):
        op = block_metric(layout, named, params)
        m = orthogonal_complement(k, g.form())
        for _ in range(6):
            x = m.random_element(rng)
            strict = isinstance(go_solve_at(op, k, x), GoCertificate)
            projected = geodesic_lemma_solvable(op, k, m, x)
            assert strict == projected


# -- splitting -----------------------------------------------------------------------

def test_split_bi_invariant(so6):
    layout, named = so6
    op = block_metric(layout, named, [2] * 6)
    report = split_check(op, layout.subalgebra, STRATEGY)
    assert report.ok and report.hypotheses_met and not report.exploratory


def test_split_dazi_branch_with_respect_to_isometry(so6):
    layout, named = so6
    op = block_metric(layout, named, [2, 2, 7, 2, 3, 3])
    kp = isometry_subalgebra(op)
    report = split_check(op, kp, STRATEGY)
    assert report.ok
    assert report.weakly_regular and report.hypotheses_met
    assert report.coset_verdict and not report.coset_verdict.disproved


def test_split_reports_only_for_disproved(so6):
    layout, named = so6
    op = block_metric(layout, named, [1, 2, 3, 4, 5, 6])
    report = split_check(op, layout.subalgebra, STRATEGY)
    assert not report.ok
    assert report.coset_verdict.disproved
    assert report.bi_invariant_on_subalgebra  # the torus block itself is fine
