"""Exact integer and rational linear algebra.

Matrices are tuples of row tuples, vectors are plain tuples.  Everything
that feeds a decision (residue classes, Smith form, similarity detection)
is computed exactly over the integers or rationals; floating point appears
only in eigenvalue estimates and operator-norm bounds, where a safe
over-estimate is all that downstream consumers need.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CandidateBallTooLarge, NotExpanding, SingularMatrix

IntVec = tuple[int, ...]
IntMatrix = tuple[IntVec, ...]
RatVec = tuple[Fraction, ...]
RatMatrix = tuple[RatVec, ...]


# ---------------------------------------------------------------------------
# vector / matrix primitives


def as_matrix(rows) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def as_vec(v) -> IntVec:
    if isinstance(v, int):
        return (v,)
    return tuple(int(x) for x in v)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_vec(a, v):
    return tuple(sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a)))


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )


def mat_sub(a, b):
    return tuple(
        tuple(a[i][j] - b[i][j] for j in range(len(a[0]))) for i in range(len(a))
    )


def mat_transpose(a):
    return tuple(zip(*a))


def mat_pow(a, k: int):
    """k-th power of a square matrix, k >= 0, exact."""
    n = len(a)
    result = identity(n)
    base = a
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_neg(v):
    return tuple(-a for a in v)


def vec_scale(c, v):
    return tuple(c * a for a in v)


def norm_sq(v):
    return sum(a * a for a in v)


def zero_vec(n: int) -> IntVec:
    return (0,) * n


def det(a: IntMatrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(a)
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def mat_frac(a) -> RatMatrix:
    return tuple(tuple(Fraction(x) for x in row) for row in a)


def mat_inv(a) -> RatMatrix:
    """Exact inverse over the rationals (SingularMatrix if det = 0)."""
    n = len(a)
    m = [[Fraction(a[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix("matrix is singular")
        m[col], m[pivot] = m[pivot], m[col]
        inv_p = 1 / m[col][col]
        m[col] = [x * inv_p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[n:]) for row in m)


def solve(a: RatMatrix, b: RatVec) -> RatVec:
    """Solve a x = b exactly over the rationals."""
    n = len(a)
    m = [[Fraction(a[i][j]) for j in range(n)] + [Fraction(b[i])] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix("system is singular")
        m[col], m[pivot] = m[pivot], m[col]
        inv_p = 1 / m[col][col]
        m[col] = [x * inv_p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(m[i][n] for i in range(n))


def adjugate(a: IntMatrix) -> IntMatrix:
    """Integer adjugate, so that adjugate(a) == det(a) * inverse(a)."""
    d = det(a)
    if d == 0:
        # fall back to cofactor expansion for the singular case
        n = len(a)
        cof = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = tuple(
                    tuple(a[r][c] for c in range(n) if c != j)
                    for r in range(n) if r != i
                )
                cof[j][i] = (-1) ** (i + j) * (det(minor) if minor else 1)
        return tuple(tuple(row) for row in cof)
    inv = mat_inv(a)
    adj = tuple(tuple(x * d for x in row) for row in inv)
    return tuple(tuple(int(x) for x in row) for row in adj)


def frac_mat_vec(a: RatMatrix, v) -> RatVec:
    return tuple(sum((Fraction(a[i][j]) * v[j] for j in range(len(v))), Fraction(0))
                 for i in range(len(a)))


def mat_inv_pow(a: IntMatrix, k: int) -> RatMatrix:
    """Exact A^{-k} for k >= 0."""
    return mat_frac(mat_pow(a, k)) if k == 0 else mat_inv(mat_pow(a, k))


def is_integral(v: RatVec) -> bool:
    return all(x.denominator == 1 for x in v)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfResult:
    """Diagonal form s with unimodular transforms: u @ a @ v == s.

    The diagonal entries are nonnegative and form a divisibility chain
    s_1 | s_2 | ... | s_n, so |prod s_i| = |det a|.
    """

    s: IntMatrix
    u: IntMatrix
    v: IntMatrix

    @property
    def diagonal(self) -> IntVec:
        return tuple(self.s[i][i] for i in range(len(self.s)))


def smith_normal_form(a: IntMatrix) -> SnfResult:
    """Smith normal form over the integers with transform tracking.

    Works for singular matrices as well; consumers that need det != 0
    check it themselves.
    """
    n = len(a)
    s = [list(row) for row in a]
    u = [list(row) for row in identity(n)]
    v = [list(row) for row in identity(n)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        # row[dst] += c * row[src]
        s[dst] = [x + c * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in s:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    def negate_row(i):
        s[i] = [-x for x in s[i]]
        u[i] = [-x for x in u[i]]

    def pivot_position(t):
        best = None
        for i in range(t, n):
            for j in range(t, n):
                if s[i][j] != 0 and (best is None or abs(s[i][j]) < abs(s[best[0]][best[1]])):
                    best = (i, j)
        return best

    def clear_block(t):
        # reduce the submatrix starting at (t, t) until s[t][t] divides
        # everything in its row and column and the rest of them is zero
        while True:
            pos = pivot_position(t)
            if pos is None:
                return False
            if pos != (t, t):
                if pos[0] != t:
                    swap_rows(t, pos[0])
                if pos[1] != t:
                    swap_cols(t, pos[1])
            p = s[t][t]
            dirty = False
            for i in range(t + 1, n):
                if s[i][t] != 0:
                    q = round_div(s[i][t], p)
                    if q:
                        add_row(t, i, -q)
                    if s[i][t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if s[t][j] != 0:
                    q = round_div(s[t][j], p)
                    if q:
                        add_col(t, j, -q)
                    if s[t][j] != 0:
                        dirty = True
            if not dirty:
                return True

    for t in range(n):
        if not clear_block(t):
            break
        if s[t][t] < 0:
            negate_row(t)

    # enforce the divisibility chain: fold offending entries back and redo
    changed = True
    while changed:
        changed = False
        for t in range(n - 1):
            a_t, a_next = s[t][t], s[t + 1][t + 1]
            if a_t != 0 and a_next % a_t != 0:
                add_col(t + 1, t, 1)
                clear_block(t)
                if s[t][t] < 0:
                    negate_row(t)
                for k in range(t + 1, n):
                    clear_block(k)
                    if s[k][k] < 0:
                        negate_row(k)
                changed = True
                break
            if a_t == 0 and a_next != 0:
                swap_rows(t, t + 1)
                swap_cols(t, t + 1)
                changed = True
                break

    return SnfResult(
        s=tuple(tuple(row) for row in s),
        u=tuple(tuple(row) for row in u),
        v=tuple(tuple(row) for row in v),
    )


def round_div(a: int, b: int) -> int:
    """Nearest-integer division; a tie keeps the floor quotient.

    divmod leaves the remainder with the divisor's sign, so stepping the
    quotient up by one always shrinks the remainder magnitude.
    """
    q, r = divmod(a, b)
    if 2 * abs(r) > abs(b):
        q += 1
    return q


# ---------------------------------------------------------------------------
# residue systems


def _class_key(adj: IntMatrix, modulus: int, v: IntVec) -> IntVec:
    """Injective label of the class of v modulo a*Z^n (adj = adjugate(a))."""
    return tuple(x % modulus for x in mat_vec(adj, v))


def minimal_norm_representative(a: IntMatrix, v: IntVec, cap: int = 200_000) -> IntVec:
    """Smallest representative of v + a*Z^n, ties broken lexicographically.

    Iterated Babai rounding shrinks the representative, then the exact
    optimum is found by enumerating the ellipsoid ||base - a t|| <= ||base||
    through per-axis bounds.  If that box exceeds the cap (only possible
    for very skewed lattices) a deterministic local search stands in.
    """
    n = len(a)
    a_inv = mat_inv(a)

    def babai(w):
        while True:
            t = tuple(int(round(x)) for x in frac_mat_vec(a_inv, w))
            if all(x == 0 for x in t):
                return w
            reduced = vec_sub(w, mat_vec(a, t))
            if norm_sq(reduced) >= norm_sq(w):
                return w
            w = reduced

    base = babai(v)
    if all(x == 0 for x in base):
        return base
    # any better w = base - a t satisfies |t_i| <= 2 ||row_i(a^-1)|| ||base||
    base_norm = math.sqrt(float(norm_sq(base)))
    bounds = []
    for i in range(n):
        row_norm = math.sqrt(sum(float(x) * float(x) for x in a_inv[i]))
        bounds.append(int(math.ceil(2.0 * row_norm * base_norm)) + 1)
    volume = 1
    for b in bounds:
        volume *= 2 * b + 1

    best = base
    if volume <= cap:
        for t in itertools.product(*[range(-b, b + 1) for b in bounds]):
            cand = vec_sub(base, mat_vec(a, t))
            if (norm_sq(cand), cand) < (norm_sq(best), best):
                best = cand
    else:
        improved = True
        while improved:
            improved = False
            for t in itertools.product(range(-2, 3), repeat=n):
                cand = vec_sub(best, mat_vec(a, t))
                if (norm_sq(cand), cand) < (norm_sq(best), best):
                    best = cand
                    improved = True
    return best


def residue_system(a: IntMatrix) -> tuple[IntVec, ...]:
    """Canonical complete residue system mod the matrix.

    Built from the Smith form box, then each class is replaced by its
    minimal-Euclidean-norm representative (lexicographic tie-break) so the
    output is deterministic.  Contains 0 and has exactly |det a| members.
    """
    d = det(a)
    if d == 0:
        raise SingularMatrix("residue systems need det != 0")
    snf = smith_normal_form(a)
    diag = [abs(x) for x in snf.diagonal]
    u_inv = mat_inv(snf.u)
    reps = []
    for y in itertools.product(*[range(s) for s in diag]):
        z = frac_mat_vec(u_inv, y)
        z_int = tuple(int(x) for x in z)
        reps.append(minimal_norm_representative(a, z_int))
    reps.sort()
    if len(set(reps)) != abs(d):
        raise SingularMatrix("internal: residue construction produced a collision")
    return tuple(reps)


def is_complete_residue_system(a: IntMatrix, digits) -> bool:
    """True iff the digits hit every class of Z^n / a*Z^n exactly once."""
    d = det(a)
    if d == 0:
        return False
    digits = tuple(as_vec(v) for v in digits)
    if len(set(digits)) != len(digits) or len(digits) != abs(d):
        return False
    adj = adjugate(a)
    keys = {_class_key(adj, abs(d), v) for v in digits}
    return len(keys) == len(digits)


# ---------------------------------------------------------------------------
# spectral data


@dataclass(frozen=True)
class SpectralInfo:
    """Numeric facts about the matrix that bound everything else.

    ball_radius_factor is a certified over-estimate of sum_j ||A^-j||_op,
    so max-digit-norm times it bounds the radius of any digit tile.
    similarity_coeff is the contraction coefficient of A^-1 and is present
    exactly when A * A^T is an integer multiple of the identity.
    """

    expanding: bool
    min_eig_modulus: float
    rho: float
    similarity_coeff: float | None
    ball_radius_factor: float


@lru_cache(maxsize=None)
def spectral_info(a: IntMatrix, tol: float = 1e-9) -> SpectralInfo:
    n = len(a)
    if det(a) == 0:
        raise SingularMatrix("spectral info needs det != 0")
    eigs = np.linalg.eigvals(np.array(a, dtype=float))
    r = float(min(abs(eigs)))
    expanding = r > 1.0 + tol

    sim = _similarity_scale_sq(a)
    coeff = float(abs(det(a))) ** (-1.0 / n) if sim is not None else None

    factor = math.inf
    if expanding:
        a_inv = np.array(mat_inv(a), dtype=float)
        partial = 0.0
        power = np.eye(n)
        sigma = None
        for _ in range(400):
            power = power @ a_inv
            op = float(np.linalg.norm(power, 2))
            partial += op
            if op < 0.5:
                sigma = op
                break
        if sigma is None:
            # expanding guarantees decay; 400 powers not shrinking means the
            # margin is extreme, keep a conservative cap instead of failing
            sigma = 0.999
        factor = partial / (1.0 - sigma) * (1.0 + 1e-9) + 1e-12

    return SpectralInfo(
        expanding=expanding,
        min_eig_modulus=r,
        rho=(1.0 + r) / 2.0 if expanding else r,
        similarity_coeff=coeff,
        ball_radius_factor=factor,
    )


def _similarity_scale_sq(a: IntMatrix) -> int | None:
    """r^2 if a @ a^T == r^2 * I exactly, else None."""
    g = mat_mul(a, mat_transpose(a))
    n = len(a)
    r2 = g[0][0]
    for i in range(n):
        for j in range(n):
            if g[i][j] != (r2 if i == j else 0):
                return None
    return r2


def similarity_contraction(a: IntMatrix) -> float | None:
    """Contraction coefficient of A^-1 when it scales Euclidean distance.

    Detects the orthogonal-multiple case exactly, and the 2x2 complex
    eigenvalue pair case (trace^2 < 4 det), which is linearly conjugate to
    a complex multiplication and therefore dimension-preserving.
    """
    n = len(a)
    d = det(a)
    if d == 0:
        return None
    if _similarity_scale_sq(a) is not None:
        return float(abs(d)) ** (-1.0 / n)
    if n == 2:
        trace = a[0][0] + a[1][1]
        if trace * trace < 4 * d:
            return float(abs(d)) ** (-1.0 / 2.0)
    return None


def require_expanding(a: IntMatrix, tol: float = 1e-9) -> SpectralInfo:
    info = spectral_info(a, tol)
    if not info.expanding:
        raise NotExpanding(f"matrix {a} is not expanding")
    return info


# ---------------------------------------------------------------------------
# lattice enumeration


def lattice_ball(n: int, radius: float, cap: int = 10**7) -> list[IntVec]:
    """Integer points with Euclidean norm <= radius (safe over-inclusion)."""
    r = int(math.floor(radius + 1e-9))
    if (2 * r + 1) ** n > cap:
        raise CandidateBallTooLarge(
            f"candidate ball holds about {(2 * r + 1) ** n} lattice points (cap {cap})"
        )
    limit = radius * radius * (1.0 + 1e-12) + 1e-9
    return [
        p
        for p in itertools.product(range(-r, r + 1), repeat=n)
        if norm_sq(p) <= limit
    ]
