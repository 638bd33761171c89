"""Metric endomorphisms and their structural analysis.

A left-invariant metric on the group is encoded by its metric endomorphism:
the positive-definite operator L, self-adjoint for the fixed invariant inner
product Q, with metric(X, Y) = Q(L X, Y).  This module builds block-scalar
operators, checks equivariance, computes the full isometry subalgebra, and
recognizes the naturally reductive normal form on simple algebras (scalar
blocks on the ideals of the isometry subalgebra, one scalar on the
complement, any positive block on the center).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import arith
from .arith import ContractViolation, is_zero, q, qarray, qzeros
from .lie import StructureAlgebra, SymmetricForm
from .subspaces import (DecomposedSubalgebra, Subspace, ideal_decomposition,
                        is_subalgebra, orthogonal_complement)


@dataclass(frozen=True)
class BlockSpec:
    """Scalar blocks (subspace, positive parameter) plus an optional free block.

    The free block carries an arbitrary inner product on a designated center
    subspace, given as a symmetric positive-definite matrix in that
    subspace's basis coordinates (the corresponding operator block is
    recovered through the center's Gram matrix).
    """

    blocks: tuple[tuple[Subspace, Fraction], ...]
    center_block: tuple[Subspace, np.ndarray] | None = None

    def subspaces(self):
        out = [s for s, _ in self.blocks]
        if self.center_block is not None:
            out.append(self.center_block[0])
        return out


class MetricOperator:
    """A positive Q-self-adjoint operator with cached eigenstructure."""

    def __init__(self, algebra: StructureAlgebra, matrix, form: SymmetricForm | None = None,
                 block_spec: BlockSpec | None = None, check: bool = True):
        self.algebra = algebra
        self.matrix = np.asarray(matrix, dtype=object)
        self.form = form or algebra.form()
        self.block_spec = block_spec
        if check:
            h = arith.exact_matmul(self.form.matrix, self.matrix)
            if not is_zero(h - h.T):
                raise ContractViolation("operator is not self-adjoint for the form")
            if not arith.is_positive_definite_exact(h):
                raise ContractViolation("metric operator is not positive definite")

    @cached_property
    def metric_matrix(self) -> np.ndarray:
        """Matrix H of the metric inner product: metric(x,y) = x^T H y."""
        return arith.exact_matmul(self.form.matrix, self.matrix)

    @cached_property
    def int_matrix(self) -> tuple[np.ndarray, int]:
        return arith.clear_denominators(self.matrix)

    def apply_int(self, x) -> tuple[np.ndarray, int]:
        """Denominator-cleared image (ints, scale) of a vector under L."""
        m_int, m_scale = self.int_matrix
        x_int, x_scale = arith.clear_denominators(np.asarray(x, dtype=object))
        if m_int.dtype == np.int64 and x_int.dtype == np.int64:
            bound = max(1, arith._max_abs(m_int)) * max(1, arith._max_abs(x_int)) * m_int.shape[1]
            if bound < 2**62:
                return m_int @ x_int, m_scale * x_scale
        return np.dot(self.matrix, np.asarray(x, dtype=object)), None

    def metric_inner(self, x, y):
        return np.dot(np.asarray(x, dtype=object),
                      arith.exact_matmul(self.metric_matrix, np.asarray(y, dtype=object)))

    def apply(self, x) -> np.ndarray:
        ints, scale = self.apply_int(x)
        return arith.from_ints(ints, scale) if scale is not None else ints

    @cached_property
    def eigenspaces(self) -> tuple[tuple[Fraction, Subspace], ...]:
        """Eigenvalues with eigenspaces, from block data when available."""
        if self.block_spec is not None and self.block_spec.center_block is None:
            by_value: dict[Fraction, Subspace] = {}
            for space, value in self.block_spec.blocks:
                by_value[value] = by_value.get(value, Subspace.zero(self.algebra)).add(space)
            return tuple(sorted(by_value.items(), key=lambda p: p[0]))
        pairs = arith.symmetric_eigenspaces(self.matrix, self.form.matrix)
        return tuple((value, Subspace(self.algebra, rows, check=False)) for value, rows in pairs)

    @cached_property
    def invariant_pieces(self) -> tuple[Subspace, ...]:
        """Finest exact L-invariant splitting (eigenspaces when rational).

        With a free center block whose spectrum is irrational the center's
        primary components stand in for its eigenspaces; every piece is still
        exactly L-invariant, which is all the sampling strategies need.
        """
        if self.block_spec is None or self.block_spec.center_block is None:
            return tuple(space for _, space in self.eigenspaces)
        by_value: dict[Fraction, Subspace] = {}
        for space, value in self.block_spec.blocks:
            by_value[value] = by_value.get(value, Subspace.zero(self.algebra)).add(space)
        pieces = [space for _, space in sorted(by_value.items(), key=lambda p: p[0])]
        center, _ = self.block_spec.center_block
        if center.dim:
            block = restrict_operator(self, center)
            for _factor, rows in arith.primary_invariant_split(block):
                pieces.append(Subspace(self.algebra, arith.exact_matmul(rows, center.basis),
                                       check=False))
        return tuple(pieces)

    def is_scalar(self) -> Fraction | None:
        value = self.matrix[0, 0]
        return value if is_zero(self.matrix - value * arith.qeye(self.algebra.dim)) else None

    def rescale(self, factor) -> "MetricOperator":
        factor = q(factor)
        if factor <= 0:
            raise ContractViolation("scaling factor must be positive")
        spec = None
        if self.block_spec is not None:
            center = self.block_spec.center_block
            spec = BlockSpec(
                blocks=tuple((s, v * factor) for s, v in self.block_spec.blocks),
                center_block=None if center is None else (
                    center[0], np.asarray(center[1], dtype=object) * factor))
        return MetricOperator(self.algebra, self.matrix * factor, self.form, spec, check=False)


def metric_from_blocks(algebra: StructureAlgebra, spec: BlockSpec,
                       form: SymmetricForm | None = None) -> MetricOperator:
    """Assemble the operator acting as parameter * Id on each scalar block.

    Blocks must be pairwise orthogonal for the form and span the algebra;
    parameters must be positive.  The optional center block contributes an
    arbitrary positive-definite symmetric matrix in its subspace coordinates.
    """
    form = form or algebra.form()
    d = algebra.dim
    total = 0
    stacked = []
    diag_blocks = []
    for space, value in spec.blocks:
        value = q(value)
        if value <= 0:
            raise ContractViolation("block parameters must be positive")
        total += space.dim
        stacked.append(space.basis)
        block = qzeros((space.dim, space.dim))
        for i in range(space.dim):
            block[i, i] = value
        diag_blocks.append(block)
    if spec.center_block is not None:
        center, inner = spec.center_block
        inner = qarray(inner)
        if inner.shape != (center.dim, center.dim):
            raise ContractViolation("center block shape mismatch")
        if not arith.is_positive_definite_exact(inner):
            raise ContractViolation("center block must be a symmetric positive definite "
                                    "inner-product matrix")
        gram = center.gram(form)
        rows, pivots = arith._rref(np.concatenate([gram, arith.qeye(center.dim)], axis=1))
        gram_inv = qarray([row[center.dim:] for row in rows])
        block = arith.exact_matmul(gram_inv, inner)   # operator block: Q(Lu, v) = inner(u, v)
        total += center.dim
        stacked.append(center.basis)
        diag_blocks.append(block)
    if total != d:
        raise ContractViolation(f"blocks span dimension {total}, expected {d}")
    basis = np.concatenate([b for b in stacked if b.shape[0]], axis=0)
    gram = arith.exact_matmul(basis, arith.exact_matmul(form.matrix, basis.T))
    offset_i = 0
    for bi in diag_blocks:
        offset_j = 0
        for bj in diag_blocks:
            if offset_j != offset_i:
                if not is_zero(gram[offset_i:offset_i + bi.shape[0], offset_j:offset_j + bj.shape[0]]):
                    raise ContractViolation("blocks are not orthogonal for the form")
            offset_j += bj.shape[0]
        offset_i += bi.shape[0]
    diag = qzeros((d, d))
    offset = 0
    for block in diag_blocks:
        k = block.shape[0]
        diag[offset:offset + k, offset:offset + k] = block
        offset += k
    # L = C D C^{-1} with C the column matrix of the stacked block bases
    cols = basis.T
    rows, pivots = arith._rref(np.concatenate([cols, arith.qeye(d)], axis=1))
    if len(pivots) != d:
        raise ContractViolation("blocks do not span the algebra")
    cols_inv = qarray([row[d:] for row in rows])
    matrix = arith.exact_matmul(arith.exact_matmul(cols, diag), cols_inv)
    return MetricOperator(algebra, matrix, form, spec)


# ---------------------------------------------------------------------------
# equivariance and the isometry subalgebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivarianceResult:
    ok: bool
    witness_index: int | None = None
    witness_residual: np.ndarray | None = None

    def __bool__(self):
        return self.ok


def equivariance_check(operator: MetricOperator, space: Subspace,
                       backend: str = arith.EXACT,
                       tol: arith.ToleranceProfile = arith.DEFAULT_TOL) -> EquivarianceResult:
    """Whether the operator commutes with ad_X for every basis vector of ``space``."""
    if backend == arith.FLOAT:
        op = arith.to_float(operator.matrix)
        scale = max(1.0, float(np.max(np.abs(op))))
        for i in range(space.dim):
            mat = arith.to_float(space.ad_matrices[i])
            comm = mat @ op - op @ mat
            if float(np.max(np.abs(comm))) > tol.residual_epsilon * scale:
                return EquivarianceResult(False, i, comm)
        return EquivarianceResult(True)
    op_int, _ = operator.int_matrix
    for i in range(space.dim):
        mat_int, _ = space.int_ad_matrices[i]
        if op_int.dtype == np.int64 and mat_int.dtype == np.int64:
            bound = max(1, arith._max_abs(op_int)) * max(1, arith._max_abs(mat_int)) * op_int.shape[1]
            if bound < 2**62:
                comm = mat_int @ op_int - op_int @ mat_int
                if np.any(comm):
                    return EquivarianceResult(False, i, comm)
                continue
        mat = space.ad_matrices[i]
        comm = arith.exact_matmul(mat, operator.matrix) - arith.exact_matmul(operator.matrix, mat)
        if not is_zero(comm):
            return EquivarianceResult(False, i, comm)
    return EquivarianceResult(True)


def skewness_system(operator: MetricOperator) -> np.ndarray:
    """Columns i: the matrix of ad_{e_i}^T H + H ad_{e_i}, flattened."""
    algebra = operator.algebra
    d = algebra.dim
    h_int, _ = arith.clear_denominators(operator.metric_matrix)
    system = np.zeros((d * d, d), dtype=h_int.dtype if h_int.dtype == np.int64 else object)
    c_int, _ = algebra.int_tensor
    for i in range(d):
        ad_i = c_int[i].T
        if h_int.dtype == np.int64 and c_int.dtype == np.int64:
            block = ad_i.T @ h_int + h_int @ ad_i
        else:
            block = np.dot(ad_i.astype(object).T, h_int.astype(object)) + \
                np.dot(h_int.astype(object), ad_i.astype(object))
        system[:, i] = block.reshape(-1)
    return system


def isometry_subalgebra(operator: MetricOperator) -> Subspace:
    """Maximal subalgebra whose adjoint operators are metric-skew.

    Solves ad_X^T H + H ad_X = 0 for X, with H the metric's matrix; the
    solution space is verified to be bracket-closed.
    """
    algebra = operator.algebra
    null = arith.nullspace_exact(skewness_system(operator).astype(object))
    space = Subspace(algebra, null, check=False)
    check = is_subalgebra(space)
    if not check:  # pragma: no cover - mathematically impossible
        raise arith.ExactComputationError("isometry candidate is not a subalgebra")
    return space


# ---------------------------------------------------------------------------
# restriction and bi-invariance
# ---------------------------------------------------------------------------

def invariant_subspace(operator: MetricOperator, space: Subspace) -> bool:
    if space.dim == 0:
        return True
    return space.coords_matrix(arith.exact_matmul(operator.matrix, space.basis.T)) is not None


def restrict_operator(operator: MetricOperator, space: Subspace) -> np.ndarray:
    """Matrix of the operator on an invariant subspace, in its basis."""
    coords = space.coords_matrix(arith.exact_matmul(operator.matrix, space.basis.T))
    if coords is None:
        raise ContractViolation("subspace is not invariant under the operator")
    return coords


@dataclass(frozen=True)
class BiInvarianceReport:
    ok: bool
    decomposition: DecomposedSubalgebra | None = None
    ideal_scalars: tuple[Fraction, ...] = ()
    center_preserved: bool = False

    def __bool__(self):
        return self.ok


def bi_invariance_check(operator: MetricOperator, subalgebra: Subspace,
                        seed: int = 0) -> BiInvarianceReport:
    """Whether the restriction to a subalgebra defines a bi-invariant metric.

    The block form is checked literally: the restriction must preserve the
    center, preserve each simple ideal, and act as a positive scalar there.
    """
    if subalgebra.dim == 0:
        return BiInvarianceReport(True, None, (), True)
    if not invariant_subspace(operator, subalgebra):
        return BiInvarianceReport(False)
    dec = ideal_decomposition(subalgebra, seed=seed)
    center_ok = invariant_subspace(operator, dec.center)
    scalars = []
    ok = center_ok
    for ideal in dec.ideals:
        if not invariant_subspace(operator, ideal):
            ok = False
            break
        block = restrict_operator(operator, ideal)
        value = block[0, 0]
        if not is_zero(block - value * arith.qeye(ideal.dim)):
            ok = False
            break
        scalars.append(value)
    return BiInvarianceReport(ok, dec, tuple(scalars), center_ok)


# ---------------------------------------------------------------------------
# naturally reductive normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DaZiReport:
    """Outcome of the naturally-reductive normal-form recognition."""

    verdict: bool
    isometry_subalgebra: Subspace
    decomposition: DecomposedSubalgebra | None
    ideal_scalars: tuple[Fraction, ...]
    complement_scalar: Fraction | None
    reason: str = ""

    def __bool__(self):
        return self.verdict


def _is_simple(algebra: StructureAlgebra) -> bool:
    if getattr(algebra, "_known_simple", None) is not None:
        return algebra._known_simple
    if algebra.canonical_form is None:
        algebra._known_simple = False
        return False
    if algebra.dim > 28:
        raise arith.ExactComputationError(
            "cannot certify simplicity of user algebras beyond dimension 28")
    dec = ideal_decomposition(Subspace.full(algebra))
    algebra._known_simple = dec.center.dim == 0 and len(dec.ideals) == 1
    return algebra._known_simple


def dazi_structure_check(operator: MetricOperator, seed: int = 0) -> DaZiReport:
    """Recognize the naturally reductive normal form on a simple algebra.

    Computes the full isometry subalgebra k', decomposes it into center and
    simple ideals, and reports true iff the operator is block-diagonal for
    center + ideals + complement with a scalar on each ideal, one scalar on
    the whole complement, and any positive block on the center.  A rebuilt
    operator from the reported data must reproduce the input exactly.
    """
    algebra = operator.algebra
    if not _is_simple(algebra):
        raise ContractViolation("normal-form recognition requires a simple ambient algebra")
    form = operator.form
    scalar = operator.is_scalar()
    full = Subspace.full(algebra)
    if scalar is not None:
        dec = DecomposedSubalgebra(center=Subspace.zero(algebra), ideals=(full,))
        return DaZiReport(True, full, dec, (scalar,), None, "scalar (bi-invariant)")
    kprime = isometry_subalgebra(operator)
    dec = ideal_decomposition(kprime, seed=seed)
    complement = orthogonal_complement(kprime, form)
    pieces = [dec.center, *dec.ideals, complement]
    for piece in pieces:
        if not invariant_subspace(operator, piece):
            return DaZiReport(False, kprime, dec, (), None,
                              "operator does not preserve the isometry block decomposition")
    scalars = []
    for ideal in dec.ideals:
        block = restrict_operator(operator, ideal)
        value = block[0, 0]
        if not is_zero(block - value * arith.qeye(ideal.dim)):
            return DaZiReport(False, kprime, dec, tuple(scalars), None,
                              "non-scalar block on a simple ideal of the isometry subalgebra")
        scalars.append(value)
    complement_scalar = None
    if complement.dim:
        block = restrict_operator(operator, complement)
        complement_scalar = block[0, 0]
        if not is_zero(block - complement_scalar * arith.qeye(complement.dim)):
            return DaZiReport(False, kprime, dec, tuple(scalars), None,
                              "complement of the isometry subalgebra carries several eigenvalues")
    # rebuild from the reported blocks and compare
    blocks = [(ideal, value) for ideal, value in zip(dec.ideals, scalars)]
    if complement.dim:
        blocks.append((complement, complement_scalar))
    center_block = None
    if dec.center.dim:
        center_operator = restrict_operator(operator, dec.center)
        center_block = (dec.center,
                        arith.exact_matmul(dec.center.gram(form), center_operator))
    rebuilt = metric_from_blocks(algebra, BlockSpec(tuple(blocks), center_block), form)
    if not is_zero(rebuilt.matrix - operator.matrix):  # pragma: no cover - rebuild identity
        raise arith.ExactComputationError("normal-form rebuild mismatch")
    return DaZiReport(True, kprime, dec, tuple(scalars), complement_scalar, "normal form")
