"""Subspace calculus over a fixed structure algebra.

A :class:`Subspace` is an ordered list of coordinate vectors (rows of
``basis``) spanning a linear subspace of the ambient algebra.  All
computations here are exact; the float backend appears only where a
tolerance-based variant is explicitly requested (rank estimation).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import arith
from .arith import ContractViolation, is_zero, q, qarray, qzeros
from .lie import StructureAlgebra, SymmetricForm


class Subspace:
    """A subspace of a structure algebra, spanned by independent basis rows."""

    def __init__(self, algebra: StructureAlgebra, basis, check: bool = True):
        self.algebra = algebra
        basis = np.asarray(basis, dtype=object)
        if basis.size == 0:
            basis = basis.reshape(0, algebra.dim)
        if basis.ndim != 2 or basis.shape[1] != algebra.dim:
            raise ContractViolation(f"basis shape {basis.shape} does not match dim {algebra.dim}")
        if check and basis.shape[0] and arith.rank_exact(basis) != basis.shape[0]:
            raise ContractViolation("basis rows are linearly dependent")
        self.basis = basis

    # -- construction --------------------------------------------------------

    @staticmethod
    def zero(algebra: StructureAlgebra) -> "Subspace":
        return Subspace(algebra, qzeros((0, algebra.dim)), check=False)

    @staticmethod
    def full(algebra: StructureAlgebra) -> "Subspace":
        return Subspace(algebra, arith.qeye(algebra.dim), check=False)

    @staticmethod
    def from_indices(algebra: StructureAlgebra, indices) -> "Subspace":
        basis = qzeros((len(indices), algebra.dim))
        for r, i in enumerate(indices):
            basis[r, i] = Fraction(1)
        return Subspace(algebra, basis, check=False)

    @staticmethod
    def span(algebra: StructureAlgebra, vectors) -> "Subspace":
        """Row-space of possibly dependent vectors."""
        vectors = np.asarray(vectors, dtype=object)
        if vectors.size == 0:
            return Subspace.zero(algebra)
        rows, pivots = arith._rref(vectors)
        basis = qarray([rows[r] for r in range(len(pivots))]) if pivots else qzeros((0, algebra.dim))
        return Subspace(algebra, basis, check=False)

    # -- basic queries --------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def _rref(self):
        rows, pivots = arith._rref(self.basis) if self.dim else ([], [])
        return qarray([rows[r] for r in range(len(pivots))]) if pivots else qzeros((0, self.algebra.dim)), tuple(pivots)

    def canonical_basis(self) -> np.ndarray:
        return self._rref[0]

    @cached_property
    def _sort_key(self) -> tuple:
        rows, pivots = self._rref
        return (self.dim, pivots, tuple(arith.fraction_str(v) for v in rows.reshape(-1)))

    def sort_key(self) -> tuple:
        return self._sort_key

    @cached_property
    def int_basis(self) -> tuple[np.ndarray, int]:
        return arith.clear_denominators(self.basis)

    @cached_property
    def int_ad_matrices(self) -> tuple:
        return tuple(arith.clear_denominators(m) for m in self.ad_matrices)

    @cached_property
    def _int_solver(self) -> tuple[np.ndarray, int]:
        return arith.clear_denominators(self._solver)

    @cached_property
    def _solver(self) -> np.ndarray:
        """Row-operation transform T with T @ basis.T = [I_k; 0] (stacked)."""
        d = self.algebra.dim
        aug = np.concatenate([self.basis.T, arith.qeye(d)], axis=1)
        rows, pivots = arith._rref(aug)
        if list(pivots[:self.dim]) != list(range(self.dim)):  # pragma: no cover
            raise ContractViolation("basis rows are linearly dependent")
        return qarray([row[self.dim:] for row in rows])

    def coords(self, vector):
        """Coordinates of ``vector`` in this basis, or None if outside."""
        vector = np.asarray(vector, dtype=object)
        if self.dim == 0:
            return qzeros(0) if is_zero(vector) else None
        y, denom = self._apply_solver(vector)
        if not is_zero(y[self.dim:]):
            return None
        return arith.from_ints(y[:self.dim], denom) if denom is not None else y[:self.dim]

    def coords_matrix(self, vectors_cols: np.ndarray) -> np.ndarray | None:
        """Coordinates of column vectors; None if any column is outside."""
        if self.dim == 0:
            return qzeros((0, vectors_cols.shape[1])) if is_zero(vectors_cols) else None
        y, denom = self._apply_solver(np.asarray(vectors_cols, dtype=object))
        if not is_zero(y[self.dim:]):
            return None
        return arith.from_ints(y[:self.dim], denom) if denom is not None else y[:self.dim]

    def _apply_solver(self, rhs: np.ndarray):
        """Solver transform applied to a vector/matrix: (result, denom|None)."""
        s_int, s_scale = self._int_solver
        r_int, r_scale = arith.clear_denominators(rhs)
        if s_int.dtype == np.int64 and r_int.dtype == np.int64:
            bound = max(1, arith._max_abs(s_int)) * max(1, arith._max_abs(r_int)) * s_int.shape[1]
            if bound < 2**62:
                return s_int @ r_int, s_scale * r_scale
        return np.dot(self._solver, np.asarray(rhs, dtype=object)), None

    def contains(self, vector) -> bool:
        return self.coords(vector) is not None

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(other.basis[r]) for r in range(other.dim))

    def spans_equal(self, other: "Subspace") -> bool:
        return self.dim == other.dim and self.contains_space(other)

    def add(self, other: "Subspace") -> "Subspace":
        stacked = np.concatenate([self.basis, other.basis], axis=0) if self.dim or other.dim \
            else qzeros((0, self.algebra.dim))
        return Subspace.span(self.algebra, stacked)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.algebra)
        stacked = np.concatenate([self.basis.T, -other.basis.T], axis=1)
        null = arith.nullspace_exact(stacked)
        vectors = np.dot(null[:, :self.dim], self.basis) if null.shape[0] else qzeros((0, self.algebra.dim))
        return Subspace.span(self.algebra, vectors)

    def gram(self, form: SymmetricForm) -> np.ndarray:
        cache = self.__dict__.setdefault("_gram_cache", {})
        key = id(form)
        if key not in cache:
            cache[key] = arith.exact_matmul(self.basis,
                                            arith.exact_matmul(form.matrix, self.basis.T))
        return cache[key]

    def is_form_orthogonal(self, form: SymmetricForm) -> bool:
        """Whether the basis rows are pairwise orthogonal for ``form`` (cached)."""
        cache = self.__dict__.setdefault("_orth_cache", {})
        key = id(form)
        if key not in cache:
            gram = self.gram(form)
            off = gram - np.diag(np.diagonal(gram))
            cache[key] = is_zero(off)
        return cache[key]

    @cached_property
    def ad_matrices(self) -> tuple[np.ndarray, ...]:
        """Adjoint operators of the basis vectors, as ambient matrices."""
        return tuple(self.algebra.ad(self.basis[r]) for r in range(self.dim))

    def random_element(self, rng: random.Random, bound: int = 9) -> np.ndarray:
        """Deterministic random combination with small integer coefficients."""
        while True:
            coeffs = [Fraction(rng.randint(-bound, bound)) for _ in range(self.dim)]
            if any(c != 0 for c in coeffs) or self.dim == 0:
                break
        vec = qzeros(self.algebra.dim)
        for c, row in zip(coeffs, self.basis):
            if c != 0:
                vec = vec + c * row
        return vec

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.algebra.name or self.algebra.dim})"


def serialize_subspace(space: Subspace) -> str:
    """Text form: an ``ambient``/``rows`` header, then one coordinate vector
    per line as rationals (same format family as structure tables)."""
    lines = [f"ambient {space.algebra.dim}", f"rows {space.dim}"]
    for r in range(space.dim):
        lines.append(" ".join(arith.fraction_str(v) for v in space.basis[r]))
    return "\n".join(lines) + "\n"


def parse_subspace(algebra, text: str) -> Subspace:
    """Parse the subspace text format against an ambient algebra."""
    ambient = rows = None
    vectors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "ambient":
            ambient = int(parts[1])
            if ambient != algebra.dim:
                raise ContractViolation(f"line {lineno}: ambient {ambient} != {algebra.dim}")
        elif parts[0] == "rows":
            rows = int(parts[1])
        else:
            try:
                vectors.append([Fraction(v) for v in parts])
            except ValueError as exc:
                raise ContractViolation(f"line {lineno}: malformed coordinate") from exc
            if len(vectors[-1]) != algebra.dim:
                raise ContractViolation(f"line {lineno}: expected {algebra.dim} coordinates")
    if rows is not None and rows != len(vectors):
        raise ContractViolation(f"expected {rows} rows, found {len(vectors)}")
    if not vectors:
        return Subspace.zero(algebra)
    return Subspace(algebra, qarray(vectors))


# ---------------------------------------------------------------------------
# memoization of structural results (algebras and subspaces are immutable)
# ---------------------------------------------------------------------------

def algebra_memo(algebra) -> dict:
    memo = getattr(algebra, "_memo", None)
    if memo is None:
        memo = {}
        algebra._memo = memo
    return memo


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def orthogonal_complement(space: Subspace, form: SymmetricForm) -> Subspace:
    """Form-orthogonal complement; requires a positive-definite form."""
    if not form.positive_definite:
        raise ContractViolation("orthogonal complement needs a positive definite form")
    if space.dim == 0:
        return Subspace.full(space.algebra)
    conditions = arith.exact_matmul(space.basis, form.matrix)
    return Subspace(space.algebra, arith.nullspace_exact(conditions), check=False)


def centralizer_in(target: Subspace, within: Subspace) -> Subspace:
    """Elements of ``within`` commuting with every element of ``target``."""
    algebra = target.algebra
    if within.dim == 0 or target.dim == 0:
        return within
    blocks = []
    for mat in target.ad_matrices:
        blocks.append(-arith.exact_matmul(mat, within.basis.T))  # [w, t_i] = -ad_{t_i} w
    system = np.concatenate(blocks, axis=0)
    null = arith.nullspace_exact(system)
    vectors = arith.exact_matmul(null, within.basis) if null.shape[0] else qzeros((0, algebra.dim))
    return Subspace(algebra, vectors, check=False)


@dataclass(frozen=True)
class SubalgebraCheck:
    ok: bool
    witness_pair: tuple[int, int] | None = None
    witness_residual: np.ndarray | None = None

    def __bool__(self):
        return self.ok


def is_subalgebra(space: Subspace) -> SubalgebraCheck:
    """Closure of the span under the bracket, with an offending pair on failure."""
    algebra = space.algebra
    for i in range(space.dim):
        for j in range(i + 1, space.dim):
            b = algebra.bracket(space.basis[i], space.basis[j])
            if space.coords(b) is None:
                proj = b - _project(space, b)
                return SubalgebraCheck(False, (i, j), proj)
    return SubalgebraCheck(True)


def _project(space: Subspace, vector: np.ndarray) -> np.ndarray:
    """Euclidean-coordinate projection used only for witness reporting."""
    if space.dim == 0:
        return qzeros(space.algebra.dim)
    gram = np.dot(space.basis, space.basis.T)
    sol = arith.solve_linear(gram, np.dot(space.basis, vector))
    return np.dot(sol.x, space.basis)


def normalizer(space: Subspace, form: SymmetricForm | None = None) -> Subspace:
    """Normalizer of a subalgebra, cross-checked against k + centralizer-in-m.

    The ambient algebra's invariant form is used for the cross-check
    decomposition; the normalizer itself is form-independent.
    """
    algebra = space.algebra
    memo = algebra_memo(algebra)
    key = ("normalizer", space.sort_key())
    if key in memo:
        return memo[key]
    check = is_subalgebra(space)
    if not check:
        raise ContractViolation(f"normalizer requires a subalgebra; pair {check.witness_pair} escapes")
    form = form or algebra.form()
    if space.dim == 0:
        return Subspace.full(algebra)
    complement = orthogonal_complement(space, form)
    proj = arith.exact_matmul(complement.basis, form.matrix)   # row kernel of this = Q-orthogonal to m
    blocks = [-arith.exact_matmul(proj, mat) for mat in space.ad_matrices]
    system = np.concatenate(blocks, axis=0)
    result = Subspace(algebra, arith.nullspace_exact(system), check=False)
    # structural cross-check: n_g(k) = k + c_m(k), Q-orthogonally
    cm = centralizer_in(space, complement)
    assert result.dim == space.dim + cm.dim, "normalizer decomposition failed"
    assert result.contains_space(space) and result.contains_space(cm)
    memo[key] = result
    return result


def centralizer_in_complement(space: Subspace, form: SymmetricForm | None = None) -> Subspace:
    """c_m(k): centralizer of the subalgebra inside its form-complement."""
    algebra = space.algebra
    form = form or algebra.form()
    return centralizer_in(space, orthogonal_complement(space, form))


# ---------------------------------------------------------------------------
# rank and regularity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CartanWitness:
    """A generic element whose centralizer realized the rank estimate."""

    generic_element: np.ndarray
    centralizer_basis: np.ndarray
    retry_count: int
    abelian: bool

    @property
    def dim(self) -> int:
        return self.centralizer_basis.shape[0]


@dataclass(frozen=True)
class RankEstimate:
    value: int
    witness: CartanWitness


def rank_estimate(space: Subspace, retries: int = 5, seed: int = 0) -> RankEstimate:
    """Rank of a compact subalgebra as the minimal generic-centralizer dimension.

    Seeded sampling with ``retries`` draws; the witness with the smallest
    centralizer wins and must be abelian (a Cartan subalgebra of the input).
    """
    if space.dim == 0:
        return RankEstimate(0, CartanWitness(qzeros(space.algebra.dim),
                                             qzeros((0, space.algebra.dim)), 0, True))
    rng = random.Random(f"rank:{seed}:{space.dim}")
    best: CartanWitness | None = None
    attempts = 0
    while attempts < retries or (best is not None and not best.abelian):
        if attempts >= retries + 8:
            raise arith.ExactComputationError("rank estimate failed to find an abelian centralizer")
        h = space.random_element(rng)
        witness = _centralizer_witness(space, h, attempts + 1)
        attempts += 1
        if best is None or witness.dim < best.dim:
            best = witness
    return RankEstimate(best.dim, best)


def _centralizer_witness(space: Subspace, element: np.ndarray, attempt: int) -> CartanWitness:
    algebra = space.algebra
    ad_h = algebra.ad(element)
    system = arith.exact_matmul(ad_h, space.basis.T)
    null = arith.nullspace_exact(system)
    vectors = arith.exact_matmul(null, space.basis) if null.shape[0] else qzeros((0, algebra.dim))
    abelian = all(is_zero(algebra.bracket(vectors[i], vectors[j]))
                  for i in range(vectors.shape[0]) for j in range(i + 1, vectors.shape[0]))
    return CartanWitness(element, vectors, attempt, abelian)


def rank_estimate_float(algebra: StructureAlgebra, basis_rows: np.ndarray,
                        retries: int = 5, seed: int = 0,
                        tol: arith.ToleranceProfile = arith.DEFAULT_TOL) -> int:
    """Float-backend rank estimate for a subalgebra given by float basis rows.

    Same sampling scheme as :func:`rank_estimate` with every zero decision
    routed through ``tol``; used for screening and for conjugation-invariance
    properties where the conjugated basis is no longer rational.
    """
    basis = np.asarray(basis_rows, dtype=float)
    k = basis.shape[0]
    if k == 0:
        return 0
    rng = random.Random(f"rank:{seed}:{k}")
    tensor_f = arith.to_float(algebra.tensor)
    best = None
    for _ in range(retries):
        coeffs = np.array([rng.randint(-9, 9) for _ in range(k)], dtype=float)
        h = coeffs @ basis
        ad_h = np.tensordot(tensor_f, h, axes=([0], [0])).T
        null = arith.nullspace_float(ad_h @ basis.T, tol)
        if best is None or null.shape[0] < best:
            best = null.shape[0]
    return int(best)


@dataclass(frozen=True)
class RegularityReport:
    regular: bool
    maximal_rank: bool
    rank_ambient: int
    rank_subalgebra: int
    rank_normalizer: int

    def __bool__(self):
        return self.regular


def has_maximal_rank(space: Subspace, seed: int = 0) -> bool:
    full = Subspace.full(space.algebra)
    return rank_estimate(space, seed=seed).value == rank_estimate(full, seed=seed).value


def is_regular(space: Subspace, seed: int = 0) -> RegularityReport:
    """Regularity: the normalizer attains the ambient rank.

    A subalgebra normalized by a Cartan subalgebra t of the ambient algebra
    has t inside its normalizer, so regularity is equivalent to the
    normalizer having maximal rank.  The zero subalgebra counts as regular.
    """
    algebra = space.algebra
    full = Subspace.full(algebra)
    rank_g = rank_estimate(full, seed=seed).value
    if space.dim == 0:
        return RegularityReport(True, rank_g == 0, rank_g, 0, rank_g)
    rank_k = rank_estimate(space, seed=seed).value
    norm = normalizer(space)
    rank_n = rank_estimate(norm, seed=seed).value
    return RegularityReport(rank_n == rank_g, rank_k == rank_g, rank_g, rank_k, rank_n)


# ---------------------------------------------------------------------------
# ideal decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecomposedSubalgebra:
    center: Subspace
    ideals: tuple[Subspace, ...]

    @property
    def semisimple(self) -> bool:
        return self.center.dim == 0


def derived_subalgebra(space: Subspace) -> Subspace:
    vectors = []
    for i in range(space.dim):
        for j in range(i + 1, space.dim):
            vectors.append(space.algebra.bracket(space.basis[i], space.basis[j]))
    if not vectors:
        return Subspace.zero(space.algebra)
    return Subspace.span(space.algebra, np.stack(vectors))


def ideal_decomposition(space: Subspace, seed: int = 0) -> DecomposedSubalgebra:
    """Split a compact subalgebra into its center and simple ideals.

    The center is the kernel of the adjoint action of the subalgebra on
    itself; the ideals are the isotypic components of the derived part acting
    on itself (pairwise inequivalent, hence recovered exactly).
    """
    memo = algebra_memo(space.algebra)
    key = ("ideals", seed, space.sort_key())
    if key in memo:
        return memo[key]
    check = is_subalgebra(space)
    if not check:
        raise ContractViolation("ideal decomposition requires a subalgebra")
    center = centralizer_in(space, space)
    derived = derived_subalgebra(space)
    if center.dim + derived.dim != space.dim or center.intersect(derived).dim != 0:
        raise ContractViolation("subalgebra is not reductive (center + derived != whole); "
                                "only compact-type inputs are supported")
    if derived.dim == 0:
        memo[key] = DecomposedSubalgebra(center=center, ideals=())
        return memo[key]
    from . import reps  # local import: reps builds on this module
    decomposition = reps.isotypic_decomposition(derived, derived, seed=seed)
    ideals = tuple(sorted(decomposition.components, key=Subspace.sort_key))
    for ideal in ideals:
        if not is_subalgebra(ideal):
            raise arith.ExactComputationError("ideal candidate is not bracket-closed")
    for a in range(len(ideals)):
        for b in range(a + 1, len(ideals)):
            for i in range(ideals[a].dim):
                for j in range(ideals[b].dim):
                    if not is_zero(space.algebra.bracket(ideals[a].basis[i], ideals[b].basis[j])):
                        raise arith.ExactComputationError("ideal candidates do not commute")
    memo[key] = DecomposedSubalgebra(center=center, ideals=ideals)
    return memo[key]
