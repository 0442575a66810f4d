"""Integral ample classes from a connected hyperbolic curve basis.

The Perron-Frobenius vector v of the Gram matrix satisfies G v = lambda v
with lambda > 0 and v > 0, so E_j.v > 0 and v.v > 0. Rounding v to nearby
rationals and clearing denominators gives positive integers a with the
same strict inequalities; every such vector is re-verified exactly.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np

from . import linalg
from .config import PAIR_RATIO_BOUND, CurveConfiguration, canonical_class, find_exceptional_subsets
from .errors import FPMCError, InputInvalid, UnsupportedPrecondition

log = logging.getLogger(__name__)

GramLike = Sequence[Sequence[int]]


def _support_connected(G: GramLike) -> bool:
    n = len(G)
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from((i, j) for i in range(n) for j in range(i + 1, n) if G[i][j] != 0)
    return nx.is_connected(g)


@dataclass(frozen=True)
class PFResult:
    lambda_lo: Fraction
    lambda_hi: Fraction
    vector: Tuple[Fraction, ...]
    shift_used: int

    @property
    def width(self) -> Fraction:
        return self.lambda_hi - self.lambda_lo

    def contains(self, x: float) -> bool:
        return self.lambda_lo <= x <= self.lambda_hi


def _collatz_wielandt(A, v) -> Tuple[Fraction, Fraction]:
    Av = linalg.mat_vec(A, v)
    ratios = [a / x for a, x in zip(Av, v)]
    return min(ratios), max(ratios)


def pf_eigen(G: GramLike, precision: Fraction = Fraction(1, 10 ** 9), max_iter: int = 10_000) -> PFResult:
    """Enclose the top eigenvalue of G and return a positive eigenvector estimate.

    G + sI is non-negative with positive diagonal, hence primitive when the
    support graph is connected; the enclosure comes from the Collatz-Wielandt
    bounds min (Av)_i/v_i <= rho(A) <= max (Av)_i/v_i evaluated exactly.
    """
    n = len(G)
    if not linalg.is_symmetric(G):
        raise InputInvalid("matrix is not symmetric")
    if any(G[i][j] < 0 for i in range(n) for j in range(n) if i != j):
        raise UnsupportedPrecondition("negative off-diagonal entry")
    if not _support_connected(G):
        raise UnsupportedPrecondition("matrix is decomposable: the Perron vector is not unique")
    shift = max(0, max(-G[i][i] for i in range(n))) + 1
    A = [[G[i][j] + (shift if i == j else 0) for j in range(n)] for i in range(n)]
    An = np.array(A, dtype=float)
    # start from the symmetric eigensolver's top vector, then polish by
    # power iteration until the float Collatz-Wielandt spread settles
    _, vecs = np.linalg.eigh(An)
    x = np.abs(vecs[:, -1]) + 1e-300
    for _ in range(max_iter):
        y = An @ x
        r = y / x
        x = y / y.max()
        if r.max() - r.min() <= 1e-13 * max(1.0, abs(r.max())):
            break
    v = [Fraction(float(t)).limit_denominator(10 ** 15) for t in x]
    lo, hi = _collatz_wielandt(A, v)
    # exact refinement when the float vector is not sharp enough
    digits = 15
    it = 0
    while hi - lo > precision and it < max_iter:
        w = linalg.mat_vec(A, v)
        m = max(w)
        digits += 1
        v = [(t / m).limit_denominator(10 ** digits) for t in w]
        lo, hi = _collatz_wielandt(A, v)
        it += 1
    m = max(v)
    return PFResult(lo - shift, hi - shift, tuple(t / m for t in v), shift)


@dataclass(frozen=True)
class ReiderData:
    coeffs: Tuple[Fraction, ...]
    square: Fraction
    products: Tuple[Fraction, ...]


@dataclass(frozen=True)
class AmpleCertificate:
    """Positive integers a over a curve basis with G a > 0 and a^T G a > 0."""

    a: Tuple[int, ...]
    products: Tuple[int, ...]
    square: int
    gram: Tuple[Tuple[int, ...], ...] = field(repr=False)
    curve_names: Tuple[str, ...] = ()
    route: str = "pf"
    reider: Optional[ReiderData] = None

    def __post_init__(self):
        verify_ample(self.gram, self.a)
        if tuple(linalg.mat_vec(self.gram, self.a)) != tuple(self.products):
            raise FPMCError("recorded products do not match G a")
        if linalg.dot(self.a, self.products) != self.square:
            raise FPMCError("recorded square does not match a^T G a")


def verify_ample(G: GramLike, a: Sequence[int]) -> Tuple[List[int], int]:
    if any(int(x) != x or x <= 0 for x in a):
        raise FPMCError(f"coefficients must be positive integers: {tuple(a)}")
    Ga = linalg.mat_vec(G, a)
    sq = linalg.dot(a, Ga)
    if any(p <= 0 for p in Ga) or sq <= 0:
        raise FPMCError(f"not an ample certificate: G a = {Ga}, a.a = {sq}")
    return Ga, sq


def certificate_for(G: GramLike, a: Sequence[int], names: Sequence[str] = (), route: str = "given") -> AmpleCertificate:
    G = tuple(tuple(int(x) for x in row) for row in G)
    a = tuple(int(x) for x in a)
    Ga, sq = verify_ample(G, a)
    return AmpleCertificate(a, tuple(int(x) for x in Ga), int(sq), G, tuple(names), route)


def _is_ample(G, a) -> bool:
    Ga = linalg.mat_vec(G, a)
    return all(p > 0 for p in Ga) and linalg.dot(a, Ga) > 0


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Positive integer vectors of given length and sum, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def minimal_ample(G: GramLike, limit: Optional[int] = None) -> Tuple[int, ...]:
    """Integer ample vector of least square.

    Since (G a)_i >= 1, a.a = sum a_i (G a)_i is at least the coordinate sum
    and at least the column-sum pairing c.a; vectors are scanned by
    increasing coordinate sum until that lower bound reaches the best
    square found.
    """
    n = len(G)
    # a.a = sum a_i (G a)_i >= sum_i max(a_i, (G a)_i) >= s * max(1, min column sum)
    rate = max(1, min(sum(G[i][j] for i in range(n)) for j in range(n)))
    best: Optional[Tuple[int, Tuple[int, ...]]] = None
    s = n
    while best is None or s * rate < best[0]:
        if limit is not None and s > limit:
            raise FPMCError(f"no ample vector with coordinate sum <= {limit}")
        for a in compositions(s, n):
            Ga = linalg.mat_vec(G, a)
            if all(p > 0 for p in Ga):
                sq = linalg.dot(a, Ga)
                if best is None or sq < best[0]:
                    best = (sq, a)
        s += 1
    return best[1]


def pf_rounded_ample(G: GramLike, max_digits: int = 60) -> Tuple[int, ...]:
    pf = pf_eigen(G)
    for digits in range(1, max_digits + 1):
        den = 10 ** digits
        b = [Fraction(round(x * den), den) for x in pf.vector]
        if any(x <= 0 for x in b):
            continue
        a = linalg.primitive(b)
        if _is_ample(G, a):
            return a
        if digits > 12 and pf.width > Fraction(1, den):
            pf = pf_eigen(G, precision=Fraction(1, den * 10))
    raise FPMCError("rounding the Perron vector did not produce an ample class")


def _basis_for(config: CurveConfiguration) -> List[int]:
    if config.rho == len(config):
        return list(range(len(config)))
    subs = find_exceptional_subsets(config, first_only=True)
    if not subs:
        raise UnsupportedPrecondition("no spanning connected subset of exceptional curves")
    return list(subs[0].indices)


def make_ample(source: Union[CurveConfiguration, GramLike], minimal: bool = False) -> AmpleCertificate:
    """Ample certificate for a configuration (over a spanning connected
    subset of its curves) or for a bare Gram matrix."""
    if isinstance(source, CurveConfiguration):
        idx = _basis_for(source)
        G = linalg.submatrix(source.gram, idx)
        names = tuple(source.names[i] for i in idx)
    else:
        G = [list(map(int, row)) for row in source]
        names = ()
    n = len(G)
    if not linalg.is_symmetric(G):
        raise InputInvalid("matrix is not symmetric")
    if linalg.signature(G).as_tuple() != (1, n - 1, 0):
        raise UnsupportedPrecondition("Gram matrix is not hyperbolic")
    if not _support_connected(G):
        raise UnsupportedPrecondition("dual graph is not connected")
    if any(G[i][j] < 0 for i in range(n) for j in range(n) if i != j):
        raise UnsupportedPrecondition("negative off-diagonal entry")
    if minimal:
        a, route = minimal_ample(G), "minimal"
    else:
        a, route = pf_rounded_ample(G), "pf"
    cert = certificate_for(G, a, names, route)
    if isinstance(source, CurveConfiguration) and len(idx) < len(source):
        h = expand(source, cert)
        if any(p <= 0 for p in source.products(h)):
            raise FPMCError("h is not positive on every listed curve")
    return cert


def expand(config: CurveConfiguration, cert: AmpleCertificate) -> List[Fraction]:
    """Coefficients of h over all curves of the configuration."""
    h = [Fraction(0)] * len(config)
    names = cert.curve_names or config.names
    for name, x in zip(names, cert.a):
        h[config.index(name)] = Fraction(x)
    return h


def reider_class(config: CurveConfiguration, cert: AmpleCertificate) -> AmpleCertificate:
    """Attach K + 4h, its square and its products with every curve."""
    K = canonical_class(config)
    h = expand(config, cert)
    hp = [k + 4 * x for k, x in zip(K.coeffs, h)]
    hE = config.products(h)
    prods = tuple(k + 4 * p for k, p in zip(K.products, hE))
    Kh = linalg.dot(K.products, h)
    hh = linalg.dot(hE, h)
    square = K.square + 8 * Kh + 16 * hh
    assert square == linalg.dot(prods, hp)
    data = ReiderData(tuple(hp), square, prods)
    return AmpleCertificate(cert.a, cert.products, cert.square, cert.gram, cert.curve_names, cert.route, data)


# ---------------------------------------------------------------------------
# enumeration of admissible Gram matrices

RESOURCE_LIMIT = 5 * 10 ** 7


def pair_bound(di: int, dj: int) -> int:
    """Largest c >= 0 with 4 c^2 < 62^2 di dj (di, dj the negated diagonal)."""
    c = 0
    while 4 * (c + 1) ** 2 < PAIR_RATIO_BOUND ** 2 * di * dj:
        c += 1
    return c


def _key(M, perm):
    n = len(M)
    diag = tuple(M[p][p] for p in perm)
    off = tuple(M[perm[i]][perm[j]] for i in range(n) for j in range(i + 1, n))
    return diag + off


def canonical_form(M: GramLike) -> Tuple[Tuple[int, ...], ...]:
    """Representative of M under simultaneous permutation: the permuted
    matrix whose (diagonal, upper triangle) tuple is lexicographically
    largest, so the diagonal comes out sorted descending."""
    n = len(M)
    best = max(itertools.permutations(range(n)), key=lambda p: _key(M, p))
    return tuple(tuple(M[best[i]][best[j]] for j in range(n)) for i in range(n))


def _is_canonical(M) -> bool:
    n = len(M)
    k0 = _key(M, tuple(range(n)))
    return all(_key(M, p) <= k0 for p in itertools.permutations(range(n)))


def is_admissible(M: GramLike, delta: int) -> bool:
    n = len(M)
    for i in range(n):
        if not (-delta <= M[i][i] <= -1):
            return False
    for i in range(n):
        for j in range(i + 1, n):
            c = M[i][j]
            if c < 0 or 4 * c * c >= PAIR_RATIO_BOUND ** 2 * M[i][i] * M[j][j]:
                return False
    if not _support_connected(M):
        return False
    return linalg.signature(M).as_tuple() == (1, n - 1, 0)


def enumerate_gram(rho: int, delta: int, max_offdiag: Optional[int] = None) -> Iterator[Tuple[Tuple[int, ...], ...]]:
    """Canonical admissible Gram matrices in lexicographic order of their
    (diagonal, upper triangle) key, largest first."""
    if rho < 2:
        raise InputInvalid("rho must be at least 2")
    if delta < 1:
        raise InputInvalid("delta must be at least 1")
    pairs = [(i, j) for i in range(rho) for j in range(i + 1, rho)]
    diags = [d for d in itertools.combinations_with_replacement(range(-1, -delta - 1, -1), rho)]
    size = 0
    for d in diags:
        s = 1
        for i, j in pairs:
            b = pair_bound(-d[i], -d[j])
            s *= (min(b, max_offdiag) if max_offdiag is not None else b) + 1
        size += s
    if size > RESOURCE_LIMIT:
        raise UnsupportedPrecondition(
            f"search space of {size} candidate matrices exceeds the resource guard ({RESOURCE_LIMIT})"
        )
    sign = (-1) ** (rho - 1)
    out = []
    for d in diags:
        ranges = []
        for i, j in pairs:
            b = pair_bound(-d[i], -d[j])
            assert b < 31 * delta  # coarse uniform bound is implied
            ranges.append(range(0, (min(b, max_offdiag) if max_offdiag is not None else b) + 1))
        for off in itertools.product(*ranges):
            M = [[0] * rho for _ in range(rho)]
            for k in range(rho):
                M[k][k] = d[k]
            for (i, j), c in zip(pairs, off):
                M[i][j] = M[j][i] = c
            det = linalg.int_det(M)
            if det == 0 or (det > 0) != (sign > 0):
                continue
            if not _is_canonical(M):
                continue
            if not _support_connected(M):
                continue
            if linalg.signature(M).as_tuple() != (1, rho - 1, 0):
                continue
            out.append(tuple(tuple(r) for r in M))
    out.sort(key=lambda M: _key(M, tuple(range(rho))), reverse=True)
    return iter(out)


@dataclass
class EnumerationSummary:
    rho: int
    delta_E: int
    count: int
    N_effective: Optional[int]
    N_prime_effective: Optional[Fraction] = None
    p_E: Optional[int] = None
    witness: Optional[Tuple[Tuple[int, ...], ...]] = None
    prime_witness: Optional[Tuple[Tuple[Tuple[int, ...], ...], Tuple[int, ...]]] = None


def effective_bounds(rho: int, delta: int, p_E: Optional[int] = None,
                     max_offdiag: Optional[int] = None) -> EnumerationSummary:
    """Largest minimal ample square over the enumerated matrices, and
    optionally the largest (K + 4h)^2 over genus assignments bounded by p_E."""
    mats = list(enumerate_gram(rho, delta, max_offdiag))
    N = None
    witness = None
    Np = None
    pw = None
    names = tuple(f"E{i + 1}" for i in range(rho))
    for M in mats:
        pf = pf_eigen(M, precision=Fraction(1, 10 ** 6))
        if not pf.lambda_lo > 0:
            raise FPMCError(f"top eigenvalue not positive for {M}")
        cert = make_ample(M, minimal=True)
        if N is None or cert.square > N:
            N, witness = cert.square, M
        if p_E is None or all(M[i][i] != -delta for i in range(rho)):
            continue
        for genera in itertools.product(range(p_E + 1), repeat=rho):
            if max(genera) != p_E:
                continue
            config = CurveConfiguration(names, M, genera)
            try:
                r = reider_class(config, cert)
            except FPMCError:
                continue
            if Np is None or r.reider.square > Np:
                Np, pw = r.reider.square, (M, genera)
    return EnumerationSummary(rho, delta, len(mats), N, Np, p_E, witness, pw)
