"""Integral quadratic lattices: hyperbolicity, discriminant forms and
enumeration of classes of bounded negative square and genus."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import floor, ceil, isqrt
from typing import Iterator, List, Optional, Sequence, Tuple

from . import linalg
from .errors import InputInvalid, UnsupportedPrecondition


@dataclass(frozen=True)
class Lattice:
    gram: Tuple[Tuple[int, ...], ...]
    basis_names: Tuple[str, ...] = ()

    def __post_init__(self):
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        if not linalg.is_symmetric(gram):
            raise InputInvalid("Gram matrix is not symmetric")
        if not self.basis_names:
            object.__setattr__(self, "basis_names", tuple(f"b{i + 1}" for i in range(len(gram))))
        if len(self.basis_names) != len(gram):
            raise InputInvalid("basis_names length does not match the Gram matrix")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def dot(self, u: Sequence, v: Sequence):
        return linalg.bilinear(u, self.gram, v)

    def signature(self) -> linalg.Signature:
        return linalg.signature(self.gram)

    def det(self) -> int:
        return int(linalg.sym_det(self.gram))


def is_hyperbolic(L: Lattice) -> bool:
    return L.signature().as_tuple() == (1, L.rank - 1, 0)


def _mod(x: Fraction, m: int) -> Fraction:
    return x - m * floor(x / m)


@dataclass(frozen=True)
class DiscriminantGroup:
    """Finite quadratic module L^*/L of an even nondegenerate lattice.

    Elements are coefficient tuples ``c`` with ``0 <= c[i] < invariant_factors[i]``
    against ``generator_lifts``; ``generator_lifts`` are vectors of L^* written in
    the lattice basis (rational coordinates).
    """

    invariant_factors: Tuple[int, ...]
    generator_lifts: Tuple[Tuple[Fraction, ...], ...]
    q_values: Tuple[Fraction, ...]
    b_values: Tuple[Tuple[Fraction, ...], ...]
    gram: Tuple[Tuple[int, ...], ...] = field(repr=False, default=())

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def elements(self) -> Iterator[Tuple[int, ...]]:
        return product(*(range(d) for d in self.invariant_factors))

    def lift(self, c: Sequence[int]) -> List[Fraction]:
        n = len(self.gram)
        v = [Fraction(0)] * n
        for ci, g in zip(c, self.generator_lifts):
            if ci:
                v = [a + ci * b for a, b in zip(v, g)]
        return v

    def q(self, c: Sequence[int]) -> Fraction:
        """Quadratic form value in [0, 2)."""
        # q is a quadratic function of the coefficients; use the stored data
        total = Fraction(0)
        k = len(c)
        for i in range(k):
            if c[i]:
                total += c[i] * c[i] * self.q_values[i]
                for j in range(i + 1, k):
                    if c[j]:
                        total += 2 * c[i] * c[j] * self.b_values[i][j]
        return _mod(total, 2)

    def b(self, c1: Sequence[int], c2: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for i, x in enumerate(c1):
            for j, y in enumerate(c2):
                if x and y:
                    total += x * y * self.b_values[i][j]
        return _mod(total, 1)

    def add(self, c1: Sequence[int], c2: Sequence[int]) -> Tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(c1, c2, self.invariant_factors))


def discriminant_group_and_form(L: Lattice) -> DiscriminantGroup:
    if not L.is_even:
        raise UnsupportedPrecondition("discriminant form requires an even lattice")
    G = [list(row) for row in L.gram]
    if L.det() == 0:
        raise UnsupportedPrecondition("lattice is degenerate")
    U, S, _ = linalg.smith_normal_form(G)
    Uinv = [[int(x) for x in row] for row in linalg.inverse(U)]
    Ginv = linalg.inverse(G)
    n = L.rank
    factors, lifts = [], []
    for i in range(n):
        d = S[i][i]
        if d > 1:
            x = [Uinv[r][i] for r in range(n)]  # generator of coker(G) in dual coordinates
            factors.append(d)
            lifts.append(tuple(linalg.mat_vec(Ginv, x)))
    k = len(lifts)
    b = [[_mod(L.dot(lifts[i], lifts[j]), 1) for j in range(k)] for i in range(k)]
    q = [_mod(L.dot(g, g), 2) for g in lifts]
    return DiscriminantGroup(
        invariant_factors=tuple(factors),
        generator_lifts=tuple(lifts),
        q_values=tuple(q),
        b_values=tuple(tuple(r) for r in b),
        gram=L.gram,
    )


# ---------------------------------------------------------------------------
# Fincke-Pohst


def _fp_decompose(Q: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    n = len(Q)
    q = [[Fraction(x) for x in row] for row in Q]
    for i in range(n):
        if q[i][i] <= 0:
            raise UnsupportedPrecondition("form is not positive definite")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def _int_range(center: Fraction, radius_sq: Fraction, scale: Fraction) -> range:
    """Integers x that might satisfy scale*(x-center)^2 <= radius_sq (a superset)."""
    r = radius_sq / scale
    s = isqrt(floor(r)) + 1
    return range(floor(center) - s, ceil(center) + s + 1)


def short_vectors(Q: Sequence[Sequence[Fraction]], bound: Fraction) -> List[Tuple[int, ...]]:
    """All integer x with x^T Q x <= bound for a positive definite rational Q."""
    n = len(Q)
    q = _fp_decompose(Q)
    bound = Fraction(bound)
    out: List[Tuple[int, ...]] = []
    x = [0] * n

    def rec(i: int, remaining: Fraction) -> None:
        if i < 0:
            out.append(tuple(x))
            return
        c = -sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        for v in _int_range(c, remaining, q[i][i]):
            t = q[i][i] * (v - c) ** 2
            if t <= remaining:
                x[i] = v
                rec(i - 1, remaining - t)
        x[i] = 0

    if bound >= 0:
        rec(n - 1, bound)
    return out


def enumerate_bounded_classes(
    L: Lattice, K: Sequence[int], delta: int, p_max: int
) -> List[Tuple[int, ...]]:
    """Classes e with -delta <= e.e < 0 and integral genus in [0, p_max].

    The genus is p = (e.e + e.K)/2 + 1, with ``K`` given by its coordinates
    in the lattice basis. Requires K.K > 0, which makes the orthogonal
    complement of K negative definite and the search finite.
    """
    if len(K) != L.rank:
        raise InputInvalid("K has the wrong length")
    if delta < 1 or p_max < 0:
        return []
    kk = L.dot(K, K)
    if kk <= 0:
        raise UnsupportedPrecondition("K.K <= 0: the set of classes may be infinite")
    GK = linalg.mat_vec(L.gram, K)  # e.K = GK . e
    n = L.rank
    # positive definite majorant: 2 (e.K)^2 / K^2 - e.e
    Q = [[Fraction(2 * GK[i] * GK[j], kk) - L.gram[i][j] for j in range(n)] for i in range(n)]
    bound = max(
        Fraction(2 * (2 * p - 2 + s) ** 2, kk) + s
        for s in range(1, delta + 1)
        for p in range(p_max + 1)
    )
    result = []
    for e in short_vectors(Q, bound):
        ee = L.dot(e, e)
        if not (-delta <= ee < 0):
            continue
        eK = linalg.dot(GK, e)
        twice = ee + eK
        if twice % 2:
            continue
        p = twice // 2 + 1
        if 0 <= p <= p_max:
            result.append(e)
    return sorted(result)
