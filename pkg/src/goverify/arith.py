"""Dual-backend scalar arithmetic and dense linear-algebra kernels.

Exact data lives in numpy arrays of dtype ``object`` whose entries are
:class:`fractions.Fraction`; float data is plain ``float64``.  Every float
comparison against zero goes through a :class:`ToleranceProfile`, exact
comparisons are literal equality.

The exact kernels are certified: rank and nullspace results produced via the
fast modular screening path are verified in rational arithmetic before they
are returned, and fall back to plain fraction Gauss elimination whenever the
verification fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg
import sympy

EXACT = "exact"
FLOAT = "float"

_P = 2_147_483_647  # prime modulus for the screening eliminations
_X = sympy.Symbol("x")


class ContractViolation(ValueError):
    """An operation was called outside its stated contract."""


class ExactComputationError(RuntimeError):
    """The exact backend cannot produce a certified result for this input."""


@dataclass(frozen=True)
class ToleranceProfile:
    """Thresholds governing every zero decision of the float backend.

    rank_epsilon: singular values below ``rank_epsilon * s_max`` count as zero.
    residual_epsilon: a linear system is solvable iff the least-squares
        residual max-norm stays below this.
    eigen_gap_epsilon: eigenvalues closer than this are clustered together.
    """

    rank_epsilon: float = 1e-9
    residual_epsilon: float = 1e-8
    eigen_gap_epsilon: float = 1e-7

    def __post_init__(self):
        if min(self.rank_epsilon, self.residual_epsilon, self.eigen_gap_epsilon) <= 0.0:
            raise ContractViolation("all tolerances must be strictly positive")


DEFAULT_TOL = ToleranceProfile()


# ---------------------------------------------------------------------------
# construction helpers for exact arrays
# ---------------------------------------------------------------------------

def q(value) -> Fraction:
    """Coerce ``value`` to an exact Fraction.  Floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    raise ContractViolation(f"cannot build an exact scalar from {value!r}")


def qarray(data) -> np.ndarray:
    """Object-dtype array with Fraction entries."""
    arr = np.array(data, dtype=object)
    flat = arr.reshape(-1)
    for i, v in enumerate(flat):
        flat[i] = q(v)
    return arr


def qzeros(shape) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(Fraction(0))
    return arr


def qeye(n: int) -> np.ndarray:
    arr = qzeros((n, n))
    for i in range(n):
        arr[i, i] = Fraction(1)
    return arr


def to_float(arr: np.ndarray) -> np.ndarray:
    return np.asarray(arr, dtype=float)


def is_zero(arr: np.ndarray) -> bool:
    arr = np.asarray(arr)
    if arr.dtype != object:
        return not np.any(arr)
    return all(v == 0 for v in arr.reshape(-1))


def fraction_str(value: Fraction) -> str:
    value = q(value)
    return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)


# ---------------------------------------------------------------------------
# integer scaling (shared fast path)
# ---------------------------------------------------------------------------

def clear_denominators(arr: np.ndarray) -> tuple[np.ndarray, int]:
    """Return ``(ints, scale)`` with ``ints == arr * scale`` entrywise.

    The integer array uses dtype int64 when every entry fits comfortably,
    otherwise dtype object with python ints (still exact).
    """
    flat = np.asarray(arr, dtype=object).reshape(-1)
    scale = 1
    for v in flat:
        scale = scale * v.denominator // math.gcd(scale, v.denominator)
    ints = [int(v * scale) for v in flat]
    out = np.array(ints, dtype=object).reshape(arr.shape)
    if not ints or max(abs(x) for x in ints) < 2**60:
        out = out.astype(np.int64)
    return out, scale


def from_ints(ints: np.ndarray, denom: int = 1) -> np.ndarray:
    """Fraction array from an integer array divided by ``denom``."""
    flat = ints.reshape(-1)
    out = np.empty(flat.shape[0], dtype=object)
    for i in range(flat.shape[0]):
        out[i] = Fraction(int(flat[i]), denom)
    return out.reshape(ints.shape)


def _max_abs(arr: np.ndarray) -> int:
    return int(np.max(np.abs(arr))) if arr.size else 0


def exact_tensordot(a_int: np.ndarray, a_scale: int, b_int: np.ndarray, b_scale: int,
                    axes, inner: int) -> np.ndarray:
    """Exact tensordot of two denominator-cleared arrays, vectorized when safe.

    ``inner`` is the total length of the contracted axes, used for the int64
    overflow bound; the object fallback is equally exact, just slower.
    """
    if a_int.dtype == np.int64 and b_int.dtype == np.int64:
        bound = max(1, _max_abs(a_int)) * max(1, _max_abs(b_int)) * max(1, inner)
        if bound < 2**62:
            return from_ints(np.tensordot(a_int, b_int, axes), a_scale * b_scale)
    result = np.tensordot(a_int.astype(object), b_int.astype(object), axes)
    return from_ints(result, a_scale * b_scale)


def exact_matmul(A, B) -> np.ndarray:
    """Exact matrix product, vectorized over int64 whenever safe."""
    A = np.asarray(A, dtype=object)
    B = np.asarray(B, dtype=object)
    a, sa = clear_denominators(A)
    b, sb = clear_denominators(B)
    inner = A.shape[-1] if A.ndim else 1
    if a.dtype == np.int64 and b.dtype == np.int64:
        bound = max(1, _max_abs(a)) * max(1, _max_abs(b)) * max(1, inner)
        if bound < 2**62:
            return from_ints(a @ b, sa * sb)
    return np.dot(A, B)


def _int_rows(arr: np.ndarray) -> np.ndarray:
    """Clear denominators independently per row (rank/nullspace invariant)."""
    rows = []
    for r in range(arr.shape[0]):
        ints, _ = clear_denominators(arr[r])
        rows.append(ints.astype(object))
    if not rows:
        return np.zeros(arr.shape, dtype=object)
    return np.stack(rows)


# ---------------------------------------------------------------------------
# exact elimination
# ---------------------------------------------------------------------------

def _rref(mat: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (rows, pivot columns)."""
    rows = [[q(v) for v in row] for row in mat]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pivot = rows[r][c]
        if pivot != 1:
            rows[r] = [v / pivot for v in rows[r]]
        rr = rows[r]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                ri = rows[i]
                for j in range(c, ncols):
                    if rr[j] != 0:
                        ri[j] = ri[j] - f * rr[j]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def _nullspace_from_rref(rows: list[list[Fraction]], pivots: list[int], ncols: int) -> np.ndarray:
    free = [c for c in range(ncols) if c not in pivots]
    basis = qzeros((len(free), ncols))
    for b, fc in enumerate(free):
        basis[b, fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            basis[b, pc] = -rows[r][fc]
    return basis


def rank_exact(mat: np.ndarray) -> int:
    """Rank over the rationals via fraction-free (Bareiss) elimination."""
    arr = np.asarray(mat, dtype=object)
    if arr.size == 0:
        return 0
    work = [[int(v) for v in row] for row in _int_rows(arr)]
    nrows = len(work)
    ncols = len(work[0])
    prev = 1
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if work[i][c] != 0), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        wr = work[r]
        for i in range(r + 1, nrows):
            wi = work[i]
            if all(x == 0 for x in wi[c:]):
                continue
            head = wi[c]
            for j in range(c + 1, ncols):
                wi[j] = (wi[j] * wr[c] - head * wr[j]) // prev
            wi[c] = 0
        prev = wr[c]
        r += 1
        if r == nrows:
            break
    return r


def _modp_pivots(mat_int: np.ndarray, reduce_above: bool = False):
    """Row echelon elimination mod ``_P``.

    Returns ``(rank, pivot row ids, pivot cols, reduced)`` where pivot row
    ids refer to the original numbering and ``reduced`` is the working array
    (fully reduced rref when ``reduce_above``).
    """
    work = (np.asarray(mat_int, dtype=object) % _P).astype(np.int64)
    nrows, ncols = work.shape
    row_ids = np.arange(nrows)
    piv_rows: list[int] = []
    piv_cols: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(work[r:, c])
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            work[[r, pr]] = work[[pr, r]]
            row_ids[[r, pr]] = row_ids[[pr, r]]
        inv = pow(int(work[r, c]), _P - 2, _P)
        work[r, c:] = (work[r, c:] * inv) % _P
        lo = 0 if reduce_above else r + 1
        others = lo + np.flatnonzero(work[lo:, c])
        others = others[others != r]
        if others.size:
            work[others, c:] = (work[others, c:] - work[others, c][:, None] * work[r, c:][None, :]) % _P
        piv_rows.append(int(row_ids[r]))
        piv_cols.append(c)
        r += 1
    return r, piv_rows, piv_cols, work


def _rational_reconstruct(a: int, modulus: int = _P) -> Fraction | None:
    """Rational n/d with n = a*d mod modulus and |n|, d below sqrt(modulus/2)."""
    bound = math.isqrt(modulus // 2)
    r0, r1 = modulus, a % modulus
    s0, s1 = 0, 1
    while r1 > bound:
        quo = r0 // r1
        r0, r1 = r1, r0 - quo * r1
        s0, s1 = s1, s0 - quo * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    n, d = (r1, s1) if s1 > 0 else (-r1, -s1)
    if math.gcd(abs(n), d) != 1:
        return None
    return Fraction(n, d)


def _reconstruct_nullspace(reduced: np.ndarray, piv_cols: list[int], ncols: int):
    """Candidate rational nullspace from a fully reduced modular rref."""
    free = [c for c in range(ncols) if c not in piv_cols]
    basis = qzeros((len(free), ncols))
    for b, fc in enumerate(free):
        basis[b, fc] = Fraction(1)
        for r, pc in enumerate(piv_cols):
            value = int(reduced[r, fc])
            if value == 0:
                continue
            rec = _rational_reconstruct(_P - value)
            if rec is None:
                return None
            basis[b, pc] = rec
    return basis


def nullspace_exact(mat: np.ndarray) -> np.ndarray:
    """Certified rational nullspace basis (rows) of ``mat``.

    Fast path: a single modular elimination locates independent rows; the
    candidate basis is then rebuilt exactly from those rows and verified
    against the full matrix.  Because rank over GF(p) never exceeds rank over
    the rationals, a verified candidate pins the nullity exactly.  On any
    verification failure the plain rational elimination is used instead.
    """
    arr = np.asarray(mat)
    if arr.ndim != 2:
        raise ContractViolation("nullspace expects a 2-d matrix")
    nrows, ncols = arr.shape
    if nrows == 0 or ncols == 0:
        return qeye(ncols) if ncols else qzeros((0, 0))
    if nrows * ncols <= 1_200:
        rows, pivots = _rref(arr)
        return _nullspace_from_rref(rows, pivots, ncols)

    ints = arr if arr.dtype != object else _int_rows(arr)
    rank_p, piv_rows, piv_cols, reduced = _modp_pivots(ints, reduce_above=True)
    if rank_p == ncols:
        return qzeros((0, ncols))
    candidate = _reconstruct_nullspace(reduced[:rank_p], piv_cols, ncols)
    if candidate is not None and is_zero(exact_matmul(ints.astype(object), candidate.T)):
        return candidate
    sub = arr[piv_rows]
    rows, pivots = _rref(sub)
    candidate = _nullspace_from_rref(rows, pivots, ncols)
    if len(pivots) == rank_p and candidate.shape[0] == ncols - rank_p:
        product = exact_matmul(ints.astype(object), candidate.T)
        if is_zero(product):
            return candidate
    rows, pivots = _rref(arr)
    return _nullspace_from_rref(rows, pivots, ncols)


# ---------------------------------------------------------------------------
# linear solve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Solution:
    """A particular solution together with a nullspace basis (rows)."""

    x: np.ndarray
    nullspace: np.ndarray


@dataclass(frozen=True)
class Inconsistent:
    """Witness that ``A x = b`` has no solution.

    On the exact backend ``rank_a < rank_ab`` is the certificate; on the float
    backend ``residual`` is the least-squares max-norm residual.
    """

    rank_a: int
    rank_ab: int
    residual: float = 0.0


def solve_linear(A, b, backend: str = EXACT, tol: ToleranceProfile = DEFAULT_TOL):
    """Solve ``A x = b`` returning :class:`Solution` or :class:`Inconsistent`."""
    A = np.asarray(A)
    b = np.asarray(b)
    if A.ndim != 2 or b.ndim != 1 or A.shape[0] != b.shape[0]:
        raise ContractViolation(f"solve_linear shape mismatch: {A.shape} vs {b.shape}")
    if backend == EXACT:
        return _solve_exact(A, b)
    if backend == FLOAT:
        return _solve_float(to_float(A), to_float(b), tol)
    raise ContractViolation(f"unknown backend {backend!r}")


def _solve_exact(A: np.ndarray, b: np.ndarray):
    nrows, ncols = A.shape
    aug = qzeros((nrows, ncols + 1))
    aug[:, :ncols] = np.asarray(A, dtype=object)
    aug[:, ncols] = np.asarray(b, dtype=object)
    rows, pivots = _rref(aug)
    if ncols in pivots:
        rank_ab = len(pivots)
        return Inconsistent(rank_a=rank_ab - 1, rank_ab=rank_ab)
    x = qzeros(ncols)
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][ncols]
    null_basis = _nullspace_from_rref([row[:ncols] for row in rows], pivots, ncols)
    return Solution(x=x, nullspace=null_basis)


def _solve_float(A: np.ndarray, b: np.ndarray, tol: ToleranceProfile):
    if A.size == 0:
        residual = float(np.max(np.abs(b))) if b.size else 0.0
        if residual > tol.residual_epsilon:
            return Inconsistent(rank_a=0, rank_ab=1, residual=residual)
        return Solution(x=np.zeros(A.shape[1]), nullspace=np.eye(A.shape[1]))
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.max(np.abs(A @ x - b))) if b.size else 0.0
    if residual > tol.residual_epsilon:
        aug = np.concatenate([A, b[:, None]], axis=1)
        return Inconsistent(rank_a=rank_float(A, tol), rank_ab=rank_float(aug, tol),
                            residual=residual)
    return Solution(x=x, nullspace=nullspace_float(A, tol))


def rank(A, backend: str = EXACT, tol: ToleranceProfile = DEFAULT_TOL) -> int:
    A = np.asarray(A)
    if backend == EXACT:
        return rank_exact(A)
    if backend == FLOAT:
        return rank_float(to_float(A), tol)
    raise ContractViolation(f"unknown backend {backend!r}")


def rank_float(A: np.ndarray, tol: ToleranceProfile = DEFAULT_TOL) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_epsilon * s[0]))


def nullspace(A, backend: str = EXACT, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    A = np.asarray(A)
    if backend == EXACT:
        return nullspace_exact(A)
    if backend == FLOAT:
        return nullspace_float(to_float(A), tol)
    raise ContractViolation(f"unknown backend {backend!r}")


def nullspace_float(A: np.ndarray, tol: ToleranceProfile = DEFAULT_TOL) -> np.ndarray:
    if A.shape[0] == 0:
        return np.eye(A.shape[1])
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    cutoff = tol.rank_epsilon * (s[0] if s.size and s[0] > 0 else 1.0)
    r = int(np.sum(s > cutoff))
    return vh[r:]


# ---------------------------------------------------------------------------
# symmetric operators
# ---------------------------------------------------------------------------

def is_self_adjoint(S, form=None, backend: str = EXACT, tol: ToleranceProfile = DEFAULT_TOL) -> bool:
    """Whether ``S`` is self-adjoint for the positive form ``form`` (default: dot)."""
    S = np.asarray(S)
    n = S.shape[0]
    G = np.asarray(form) if form is not None else (qeye(n) if backend == EXACT else np.eye(n))
    GS = np.dot(G, S)
    if backend == EXACT:
        return is_zero(GS - GS.T)
    GS = to_float(GS)
    scale = max(1.0, float(np.max(np.abs(GS))))
    return float(np.max(np.abs(GS - GS.T))) <= tol.residual_epsilon * scale


def is_positive_definite_exact(S: np.ndarray) -> bool:
    """Exact positive definiteness of a symmetric rational matrix (pivot signs)."""
    S = np.asarray(S, dtype=object)
    if not is_zero(S - S.T):
        raise ContractViolation("positive definiteness test expects a symmetric matrix")
    n = S.shape[0]
    work = [[q(v) for v in row] for row in S]
    for k in range(n):
        pivot = work[k][k]
        if pivot <= 0:
            return False
        for i in range(k + 1, n):
            f = work[i][k] / pivot
            if f != 0:
                for j in range(k, n):
                    work[i][j] = work[i][j] - f * work[k][j]
    return True


def minimal_polynomial_exact(C: np.ndarray) -> sympy.Poly:
    """Minimal polynomial of a rational square matrix, via Krylov chains.

    The minimal polynomial equals the least common multiple of the local
    annihilators of any spanning set of vectors; standard basis vectors are
    used, stopping early once the running degree reaches the matrix size.
    """
    C = np.asarray(C, dtype=object)
    n = C.shape[0]
    if n == 0:
        return sympy.Poly(1, _X, domain="QQ")
    poly = sympy.Poly(1, _X, domain="QQ")
    for seed in range(n):
        if poly.degree() >= n:
            break
        if poly.degree() > 0 and is_zero(_eval_poly_vector(poly, C, _unit(n, seed))):
            continue
        chain = [_unit(n, seed)]
        echelon: list[list[Fraction]] = []
        coeffs = None
        while True:
            vec = chain[-1]
            rep = _reduce_against(echelon, vec)
            if rep is None:
                dep = _dependence(chain)
                coeffs = dep
                break
            echelon.append(rep)
            chain.append(np.dot(C, vec))
        local = sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in coeffs])),
                           _X, domain="QQ")
        poly = sympy.lcm(poly, local)
    return sympy.Poly(poly, _X, domain="QQ").monic()


def _unit(n: int, i: int) -> np.ndarray:
    v = qzeros(n)
    v[i] = Fraction(1)
    return v


def _reduce_against(echelon: list[list[Fraction]], vec: np.ndarray):
    """Reduce ``vec`` against echelon rows; append-ready row or None if dependent."""
    work = [q(v) for v in vec]
    for row in echelon:
        lead = next(i for i, v in enumerate(row) if v != 0)
        if work[lead] != 0:
            f = work[lead] / row[lead]
            for j in range(lead, len(work)):
                work[j] = work[j] - f * row[j]
    if all(v == 0 for v in work):
        return None
    return work


def _dependence(chain: list[np.ndarray]) -> list[Fraction]:
    """Monic dependence coefficients: chain[-1] = sum c_i chain[i]."""
    mat = np.stack(chain[:-1]).T
    sol = _solve_exact(mat, chain[-1])
    if isinstance(sol, Inconsistent):  # pragma: no cover - contradicts chain construction
        raise ExactComputationError("krylov dependence solve failed")
    coeffs = [-c for c in sol.x]
    coeffs.append(Fraction(1))
    return coeffs


def _eval_poly_vector(poly: sympy.Poly, C: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = qzeros(v.shape[0])
    for c in poly.all_coeffs():
        cf = Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
        out = np.dot(C, out) + cf * v
    return out


def _eval_poly_matrix(poly: sympy.Poly, C: np.ndarray) -> np.ndarray:
    n = C.shape[0]
    out = qzeros((n, n))
    eye = qeye(n)
    for c in poly.all_coeffs():
        cf = Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
        out = np.dot(C, out) + cf * eye
    return out


def primary_invariant_split(C: np.ndarray) -> list[tuple[sympy.Poly, np.ndarray]]:
    """Primary decomposition of a rational matrix over the rationals.

    Returns ``(factor, basis rows)`` per irreducible factor of the minimal
    polynomial; the kernels are exact and their dimensions sum to the ambient
    dimension whenever ``C`` is diagonalizable (always, for form-symmetric
    inputs).
    """
    C = np.asarray(C, dtype=object)
    n = C.shape[0]
    poly = minimal_polynomial_exact(C)
    pieces = []
    total = 0
    for factor, _mult in poly.factor_list()[1]:
        factor = sympy.Poly(factor, _X, domain="QQ")
        kernel = nullspace_exact(_eval_poly_matrix(factor, C))
        if kernel.shape[0]:
            pieces.append((factor, kernel))
            total += kernel.shape[0]
    if total != n:
        raise ExactComputationError("primary decomposition did not exhaust the space "
                                    "(matrix is not semisimple over the rationals)")
    return pieces


def symmetric_eigenspaces(S, form=None, backend: str = EXACT,
                          tol: ToleranceProfile = DEFAULT_TOL) -> list[tuple[object, np.ndarray]]:
    """Eigen-decomposition of an operator self-adjoint for a positive form.

    Returns ``(eigenvalue, basis rows)`` sorted by eigenvalue.  The exact
    backend requires a rational spectrum (guaranteed for block-scalar
    operators built by this package) and raises
    :class:`ExactComputationError` otherwise; the float backend clusters
    eigenvalues with ``tol.eigen_gap_epsilon``.
    """
    S = np.asarray(S)
    n = S.shape[0]
    if not is_self_adjoint(S, form, backend=backend, tol=tol):
        raise ContractViolation("operator is not self-adjoint for the supplied form")
    if backend == EXACT:
        out = []
        for factor, basis in primary_invariant_split(np.asarray(S, dtype=object)):
            if factor.degree() != 1:
                raise ExactComputationError(
                    f"irrational eigenvalues (factor {factor.expr}); use the float backend")
            lead, constant = factor.all_coeffs()
            root = sympy.Rational(-constant, lead)
            value = Fraction(int(sympy.numer(root)), int(sympy.denom(root)))
            out.append((value, basis))
        out.sort(key=lambda p: p[0])
        return out
    if backend != FLOAT:
        raise ContractViolation(f"unknown backend {backend!r}")
    Sf = to_float(S)
    if form is None:
        values, vectors = np.linalg.eigh((Sf + Sf.T) / 2.0)
    else:
        G = to_float(np.asarray(form))
        A = G @ Sf
        values, vectors = scipy.linalg.eigh((A + A.T) / 2.0, G)
    order = np.argsort(values)
    values, vectors = values[order], vectors[:, order]
    gap = tol.eigen_gap_epsilon * max(1.0, float(np.max(np.abs(values))) if n else 1.0)
    clusters: list[tuple[float, np.ndarray]] = []
    start = 0
    for i in range(1, n + 1):
        if i == n or values[i] - values[i - 1] > gap:
            clusters.append((float(np.mean(values[start:i])), vectors[:, start:i].T))
            start = i
    return clusters
