"""Exact integer and rational linear algebra.

Everything here works on plain nested lists of ``int`` or
``fractions.Fraction``. Matrices are small (dimension at most a dozen or
so), so the straightforward cubic algorithms are all we need.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]
IntMatrix = List[List[int]]
Vector = List[Fraction]


@dataclass(frozen=True)
class Signature:
    n_plus: int
    n_minus: int
    n_zero: int

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.n_plus, self.n_minus, self.n_zero)

    def __str__(self) -> str:
        return f"({self.n_plus},{self.n_minus},{self.n_zero})"


@dataclass(frozen=True)
class LinearSolution:
    """Outcome of :func:`solve_linear`.

    ``status`` is one of ``"unique"``, ``"inconsistent"`` or
    ``"underdetermined"``. For ``"underdetermined"`` a particular
    solution is still given in ``x``.
    """

    status: str
    x: Optional[Tuple[Fraction, ...]] = None

    @property
    def is_unique(self) -> bool:
        return self.status == "unique"


# ---------------------------------------------------------------------------
# small helpers


def as_fraction_matrix(M: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in M]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M: Sequence[Sequence]) -> list:
    return [list(col) for col in zip(*M)] if M else []


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def mat_vec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return sum((a * b for a, b in zip(u, v)), 0)


def bilinear(u: Sequence, G: Sequence[Sequence], v: Sequence):
    """u^T G v."""
    return dot(u, mat_vec(G, v))


def is_symmetric(M: Sequence[Sequence]) -> bool:
    n = len(M)
    return all(len(row) == n for row in M) and all(
        M[i][j] == M[j][i] for i in range(n) for j in range(i + 1, n)
    )


def primitive(v: Sequence) -> Tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector on its ray.

    The direction is preserved (positive scaling only). The zero vector
    is returned unchanged.
    """
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def submatrix(M: Sequence[Sequence], rows: Sequence[int], cols: Optional[Sequence[int]] = None):
    cols = rows if cols is None else cols
    return [[M[i][j] for j in cols] for i in rows]


# ---------------------------------------------------------------------------
# congruence diagonalization


def signature_and_diagonalize(M: Sequence[Sequence]) -> Tuple[Signature, Matrix, Vector]:
    """Diagonalize a symmetric matrix by congruence.

    Returns ``(signature, T, d)`` where ``T^T M T = diag(d)`` and ``T`` is
    rational with determinant +-1. Zero pivots are handled by symmetric
    row/column swaps, and when the whole remaining diagonal vanishes by the
    substitution x_i -> x_i + x_j, which produces a diagonal entry
    ``2 M[i][j]``.
    """
    if not is_symmetric(M):
        raise ValueError("matrix is not symmetric")
    n = len(M)
    A = as_fraction_matrix(M)
    T = as_fraction_matrix(identity(n))

    def swap(i: int, j: int) -> None:
        if i == j:
            return
        A[i], A[j] = A[j], A[i]
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in T:
            row[i], row[j] = row[j], row[i]

    def add_to(i: int, j: int, c: Fraction) -> None:
        # x_i -> x_i + c x_j on the form, i.e. column/row i += c * column/row j
        for row in A:
            row[i] += c * row[j]
        A[i] = [a + c * b for a, b in zip(A[i], A[j])]
        for row in T:
            row[i] += c * row[j]

    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][i] != 0), None)
        if piv is None:
            pair = next(
                ((i, j) for i in range(k, n) for j in range(i + 1, n) if A[i][j] != 0),
                None,
            )
            if pair is None:
                break
            i, j = pair
            add_to(i, j, Fraction(1))
            piv = i
        swap(k, piv)
        p = A[k][k]
        for r in range(k + 1, n):
            if A[r][k] != 0:
                add_to(r, k, -A[r][k] / p)

    d = [A[i][i] for i in range(n)]
    sig = Signature(
        sum(1 for x in d if x > 0),
        sum(1 for x in d if x < 0),
        sum(1 for x in d if x == 0),
    )
    return sig, T, d


def signature(M: Sequence[Sequence]) -> Signature:
    return signature_and_diagonalize(M)[0]


def sym_det(M: Sequence[Sequence]) -> Fraction:
    """Determinant of a symmetric matrix, read off the diagonalization.

    The congruence transform has determinant +-1, so its square is 1.
    """
    _, _, d = signature_and_diagonalize(M)
    out = Fraction(1)
    for x in d:
        out *= x
    return out


def sym_rank(M: Sequence[Sequence]) -> int:
    s = signature(M)
    return s.n_plus + s.n_minus


# ---------------------------------------------------------------------------
# elimination


def rref(M: Sequence[Sequence]) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and pivot columns."""
    A = as_fraction_matrix(M)
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    return len(rref(M)[1])


def independent_rows(M: Sequence[Sequence]) -> List[int]:
    """Greedy maximal set of linearly independent rows (earliest first).

    For a symmetric matrix the principal submatrix on these indices is
    nonsingular.
    """
    chosen: List[int] = []
    for i in range(len(M)):
        if rank([M[j] for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
    return chosen


def kernel_basis(M: Sequence[Sequence]) -> List[Tuple[int, ...]]:
    """Primitive integer vectors spanning the right null space of M."""
    if not M:
        return []
    n = len(M[0])
    R, pivots = rref(M)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(primitive(v))
    return basis


def solve_linear(A: Sequence[Sequence], b: Sequence) -> LinearSolution:
    """Solve A x = b exactly."""
    m = len(A)
    n = len(A[0]) if m else 0
    if len(b) != m:
        raise ValueError("dimension mismatch")
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug) if m else ([], [])
    if n in pivots:
        return LinearSolution("inconsistent")
    x = [Fraction(0)] * n
    for row, p in zip(R, pivots):
        x[p] = row[n]
    status = "unique" if len(pivots) == n else "underdetermined"
    return LinearSolution(status, tuple(x))


def inverse(M: Sequence[Sequence]) -> Matrix:
    n = len(M)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R]


def int_det(M: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant for square integer matrices."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if p is None:
                return 0
            A[k], A[p] = A[p], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(M: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, S, V) with U M V = S, U and V unimodular.

    S is diagonal with non-negative entries and d_i | d_{i+1}.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    S = [list(map(int, row)) for row in M]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        S[dst] = [a + c * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for row in S:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    def negate_row(i):
        S[i] = [-x for x in S[i]]
        U[i] = [-x for x in U[i]]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(S[i][j]), i, j) for i in range(t, m) for j in range(t, n) if S[i][j] != 0]
            if not nz:
                break
            _, pi, pj = min(nz)
            swap_rows(t, pi)
            swap_cols(t, pj)
            done = True
            for i in range(t + 1, m):
                q = S[i][t] // S[t][t]
                if q:
                    add_row(i, t, -q)
                if S[i][t] != 0:
                    done = False
            for j in range(t + 1, n):
                q = S[t][j] // S[t][t]
                if q:
                    add_col(j, t, -q)
                if S[t][j] != 0:
                    done = False
            if not done:
                continue
            # divisibility: fold in any entry not divisible by the pivot
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % S[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if t < m and t < n and S[t][t] < 0:
            negate_row(t)
    return U, S, V


def invariant_factors(M: Sequence[Sequence[int]]) -> List[int]:
    _, S, _ = smith_normal_form(M)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0))]
