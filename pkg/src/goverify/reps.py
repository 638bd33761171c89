"""Representation-theoretic engine over the adjoint action.

Provides intertwiner spaces between invariant subspaces, module
disjointness, isotypic decompositions and the weak-regularity decision.
Everything here is exact; equivalence of real modules is decided purely by
intertwiner-space dimension, which for the completely reducible actions of
compact subalgebras coincides with sharing an irreducible constituent.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
import numpy as np

from . import arith
from .arith import ContractViolation, is_zero, qzeros
from .lie import SymmetricForm
from .subspaces import (Subspace, algebra_memo, centralizer_in, normalizer,
                        orthogonal_complement)


@dataclass(frozen=True)
class AdRestriction:
    """The action of a subalgebra on an invariant subspace, in coordinates.

    ``matrices[i]`` is the operator of the i-th basis vector of ``acting`` on
    ``space``, written in the basis of ``space``.
    """

    acting: Subspace
    space: Subspace
    matrices: tuple[np.ndarray, ...]

    def check_homomorphism(self) -> bool:
        """Whether the action matrices respect brackets exactly."""
        h = self.acting
        for i in range(h.dim):
            for j in range(i + 1, h.dim):
                bracket = h.algebra.bracket(h.basis[i], h.basis[j])
                coords = h.coords(bracket)
                if coords is None:
                    return False
                expected = sum((c * m for c, m in zip(coords, self.matrices)),
                               qzeros(self.matrices[0].shape))
                comm = np.dot(self.matrices[i], self.matrices[j]) - \
                    np.dot(self.matrices[j], self.matrices[i])
                if not is_zero(comm - expected):
                    return False
        return True


def ad_restriction(acting: Subspace, space: Subspace) -> AdRestriction:
    """Action matrices of ``acting`` on ``space``; raises if not invariant."""
    if acting.algebra is not space.algebra:
        raise ContractViolation("acting and space must share an ambient algebra")
    mats = []
    for i in range(acting.dim):
        image = arith.exact_matmul(acting.ad_matrices[i], space.basis.T)
        coords = space.coords_matrix(image)
        if coords is None:
            raise ContractViolation(
                f"subspace is not invariant under acting basis vector {i}")
        mats.append(coords)
    if space.dim == 0:
        mats = [qzeros((0, 0)) for _ in range(acting.dim)]
    return AdRestriction(acting=acting, space=space, matrices=tuple(mats))


# ---------------------------------------------------------------------------
# linear systems for intertwiners and commutants
# ---------------------------------------------------------------------------

def _int_action(matrix: np.ndarray) -> np.ndarray:
    ints, _ = arith.clear_denominators(matrix)
    return ints


def _intertwiner_block(rho_dom: np.ndarray, rho_cod: np.ndarray) -> np.ndarray:
    """Rows enforcing rho_cod T = T rho_dom on vec(T), T of shape (cod, dom)."""
    d_dom = rho_dom.shape[0]
    d_cod = rho_cod.shape[0]
    a, sa = arith.clear_denominators(rho_cod)
    b, sb = arith.clear_denominators(rho_dom)
    scale_a, scale_b = int(sb), int(sa)  # cross-multiply to a common denominator
    left = np.kron(a * scale_a, np.eye(d_dom, dtype=a.dtype))
    right = np.kron(np.eye(d_cod, dtype=b.dtype), (b * scale_b).T)
    return left - right


def _solve_equivariance(blocks_for, count: int, unknowns: int, seed_tag: str):
    """Nullspace of the joint system of ``count`` equivariance blocks.

    ``blocks_for(coeffs)`` must return the block of the linear combination
    ``sum coeffs[i] X_i`` of acting elements.  A small random generating
    subset is solved first and the candidate basis is verified against every
    single block; verified candidates are sound because the full kernel is
    contained in any subset kernel.
    """
    if count == 0 or unknowns == 0:
        return arith.qeye(unknowns)
    singles = [None] * count

    def single(i):
        if singles[i] is None:
            coeffs = [0] * count
            coeffs[i] = 1
            singles[i] = blocks_for(coeffs)
        return singles[i]

    if count <= 3:
        system = np.concatenate([single(i) for i in range(count)], axis=0)
        return arith.nullspace_exact(system)

    rng = random.Random(f"equiv:{seed_tag}:{count}:{unknowns}")
    chosen = [blocks_for([rng.randint(-9, 9) for _ in range(count)]) for _ in range(2)]
    pending = list(range(count))
    for _round in range(count + 1):
        system = np.concatenate(chosen, axis=0)
        candidate = arith.nullspace_exact(system)
        if candidate.shape[0] == 0:
            return candidate
        failing = None
        for i in pending:
            block = single(i)
            if not is_zero(arith.exact_matmul(block.astype(object), candidate.T)):
                failing = i
                break
        if failing is None:
            return candidate
        chosen.append(single(failing))
        pending.remove(failing)
    raise arith.ExactComputationError("equivariance system did not stabilize")  # pragma: no cover


@dataclass(frozen=True)
class IntertwinerSpace:
    """Basis of maps T with action_cod(X) T = T action_dom(X) for all X."""

    domain: AdRestriction
    codomain: AdRestriction
    basis: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


def intertwiner_space(acting: Subspace, space1: Subspace, space2: Subspace) -> IntertwinerSpace:
    """Solve the intertwining system between two invariant subspaces."""
    dom = ad_restriction(acting, space1)
    cod = ad_restriction(acting, space2)
    d1, d2 = space1.dim, space2.dim
    if d1 == 0 or d2 == 0:
        return IntertwinerSpace(dom, cod, ())
    if acting.dim == 0:
        basis = tuple(_unit_matrix(d2, d1, r, c) for r in range(d2) for c in range(d1))
        return IntertwinerSpace(dom, cod, basis)
    dom_ints = [_int_action(m) for m in dom.matrices]
    cod_ints = [_int_action(m) for m in cod.matrices]

    def blocks_for(coeffs):
        rho1 = sum(c * m for c, m in zip(coeffs, dom.matrices))
        rho2 = sum(c * m for c, m in zip(coeffs, cod.matrices))
        return _intertwiner_block(np.asarray(rho1, dtype=object), np.asarray(rho2, dtype=object))

    null = _solve_equivariance(blocks_for, acting.dim, d1 * d2,
                               seed_tag=f"itw:{d1}:{d2}")
    del dom_ints, cod_ints
    basis = tuple(null[r].reshape(d2, d1) for r in range(null.shape[0]))
    return IntertwinerSpace(dom, cod, basis)


def _unit_matrix(rows, cols, r, c):
    m = qzeros((rows, cols))
    m[r, c] = Fraction(1)
    return m


def modules_disjoint(acting: Subspace, space1: Subspace, space2: Subspace) -> bool:
    """True iff no nonzero intertwiner exists between the two modules.

    For completely reducible actions this is exactly the statement that the
    modules share no irreducible constituent.
    """
    return intertwiner_space(acting, space1, space2).dim == 0


# ---------------------------------------------------------------------------
# symmetric commutant and isotypic decomposition
# ---------------------------------------------------------------------------

def symmetric_commutant(restriction: AdRestriction, form: SymmetricForm) -> list[np.ndarray]:
    """Basis of operators commuting with the action and symmetric for the form.

    Operators are returned in the coordinates of ``restriction.space``.
    """
    p = restriction.space.dim
    if p == 0:
        return []
    gram = restriction.space.gram(form)
    gram_int, _ = arith.clear_denominators(gram)
    sym_rows = np.kron(gram_int, np.eye(p, dtype=gram_int.dtype))
    swap = np.array([b * p + a for a in range(p) for b in range(p)])
    sym_rows = sym_rows - np.kron(np.eye(p, dtype=gram_int.dtype), gram_int.T)[:, swap]

    count = restriction.acting.dim

    def blocks_for(coeffs):
        rho = sum(c * m for c, m in zip(coeffs, restriction.matrices))
        rho = np.asarray(rho, dtype=object)
        return _intertwiner_block(rho, rho)

    if count:
        comm_null = _solve_equivariance(blocks_for, count, p * p, seed_tag=f"comm:{p}")
        if comm_null.shape[0] == 0:
            return []
        reduced = arith.exact_matmul(sym_rows.astype(object), comm_null.T)
        inner = arith.nullspace_exact(reduced)
        vectors = arith.exact_matmul(inner, comm_null) if inner.shape[0] else qzeros((0, p * p))
    else:
        vectors = arith.nullspace_exact(sym_rows.astype(object))
    return [vectors[r].reshape(p, p) for r in range(vectors.shape[0])]


@dataclass(frozen=True)
class IsotypicDecomposition:
    components: tuple[Subspace, ...]
    labels: tuple[str, ...]
    multiplicities: tuple[int | None, ...]


def isotypic_decomposition(acting: Subspace, space: Subspace, seed: int = 0,
                           retries: int = 3) -> IsotypicDecomposition:
    """Isotypic decomposition of the action of ``acting`` on ``space``.

    Splits with primary decompositions of generic symmetric commutant
    elements over the rationals, then merges pieces whose mutual intertwiner
    space is nonzero.  A piece whose symmetric commutant is scalar is
    irreducible (its label says so); a piece that resists rational splitting
    is labeled ``not-split-by-this-procedure`` -- downstream decisions only
    need the disjointness of distinct components, which holds either way.
    """
    algebra = space.algebra
    form = algebra.form()
    if space.dim == 0:
        return IsotypicDecomposition((), (), ())
    if acting.dim == 0:
        return IsotypicDecomposition((space,), ("trivial",), (space.dim,))
    rng = random.Random(f"isotypic:{seed}:{space.dim}")

    final: list[tuple[Subspace, str]] = []
    stack = [space]
    while stack:
        piece = stack.pop()
        restriction = ad_restriction(acting, piece)
        commutant = symmetric_commutant(restriction, form)
        if len(commutant) <= 1:
            final.append((piece, "irreducible"))
            continue
        split = _try_split(piece, commutant, rng, retries)
        if split is None:
            final.append((piece, "not-split-by-this-procedure"))
        else:
            stack.extend(split)

    final.sort(key=lambda pair: pair[0].sort_key())
    merged = _merge_equivalent(acting, final)
    components = tuple(c for c, _, _ in merged)
    labels = tuple(l for _, l, _ in merged)
    mults = tuple(m for _, _, m in merged)
    return IsotypicDecomposition(components, labels, mults)


def _try_split(piece: Subspace, commutant: list[np.ndarray], rng: random.Random,
               retries: int) -> list[Subspace] | None:
    for _ in range(retries):
        combo = sum((Fraction(rng.randint(-9, 9)) * c for c in commutant),
                    qzeros(commutant[0].shape))
        try:
            parts = arith.primary_invariant_split(combo)
        except arith.ExactComputationError:
            continue
        if len(parts) > 1:
            out = []
            for _factor, rows in parts:
                vectors = arith.exact_matmul(rows, piece.basis)
                out.append(Subspace(piece.algebra, vectors, check=False))
            return out
    return None


def _merge_equivalent(acting: Subspace, pieces: list[tuple[Subspace, str]]):
    n = len(pieces)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if find(i) == find(j):
                continue
            if not modules_disjoint(acting, pieces[i][0], pieces[j][0]):
                parent[find(j)] = find(i)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        total = pieces[members[0]][0]
        for idx in members[1:]:
            total = total.add(pieces[idx][0])
        all_irr = all(pieces[idx][1] == "irreducible" for idx in members)
        dims = {pieces[idx][0].dim for idx in members}
        if all_irr and len(dims) == 1:
            label = "irreducible" if len(members) == 1 else "isotypic"
            mult = len(members)
        else:
            label = "not-split-by-this-procedure"
            mult = None
        out.append((total, label, mult))
    out.sort(key=lambda triple: triple[0].sort_key())
    return out


# ---------------------------------------------------------------------------
# weak regularity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeakRegularityReport:
    weakly_regular: bool
    dim_subalgebra: int
    dim_centralizer_in_complement: int
    dim_opposite: int
    intertwiner_dim: int

    def __bool__(self):
        return self.weakly_regular


def is_weakly_regular(space: Subspace, seed: int = 0) -> WeakRegularityReport:
    """Decide weak regularity of a subalgebra.

    Computes the normalizer n, the orthogonal complement p of n, and tests
    that no nonzero ad_n-submodule of the subalgebra is equivalent to one of
    p -- i.e. that the total intertwiner space between them vanishes.  The
    zero subalgebra is weakly regular by convention.
    """
    algebra = space.algebra
    form = algebra.form()
    if space.dim == 0:
        return WeakRegularityReport(True, 0, 0, algebra.dim, 0)
    memo = algebra_memo(algebra)
    key = ("weakreg", seed, id(algebra.inner_product), space.sort_key())
    if key in memo:
        return memo[key]
    norm = normalizer(space, form)
    complement = orthogonal_complement(space, form)
    c_m = centralizer_in(space, complement)
    p = orthogonal_complement(norm, form)
    itw = intertwiner_space(norm, space, p)
    memo[key] = WeakRegularityReport(
        weakly_regular=itw.dim == 0,
        dim_subalgebra=space.dim,
        dim_centralizer_in_complement=c_m.dim,
        dim_opposite=p.dim,
        intertwiner_dim=itw.dim,
    )
    return memo[key]


def criterion_weak_regularity(space: Subspace) -> bool:
    """Sufficient criterion: the subalgebra's own action separates k from m.

    If no nonzero ad_k-submodule of k is equivalent to one of the complement
    m, then the subalgebra is weakly regular (the normalizer only refines
    both sides).
    """
    algebra = space.algebra
    form = algebra.form()
    if space.dim == 0:
        return True
    complement = orthogonal_complement(space, form)
    return modules_disjoint(space, space, complement)
