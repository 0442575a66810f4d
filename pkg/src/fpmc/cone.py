"""Polyhedral cones in exact arithmetic.

The nef side of a configuration is the cone D = {x : x.E_i >= 0}. Its
extreme rays are computed by the double description method, inserting one
inequality at a time and testing adjacency by rank. D lies in the closed
positive light cone exactly when every extreme ray has non-negative square
and every pair of rays has non-negative product; by self-duality of that
light cone this is the same as cone(E_i) containing it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from . import linalg
from .config import CurveConfiguration, validate
from .errors import InputInvalid, UnsupportedPrecondition

Ray = Tuple[int, ...]


@dataclass(frozen=True)
class RaySet:
    rays: Tuple[Ray, ...]
    squares: Tuple[int, ...] = ()
    products: Tuple[Tuple[int, ...], ...] = ()

    def __len__(self) -> int:
        return len(self.rays)


def extreme_rays(inequalities: Sequence[Sequence], form: Optional[Sequence[Sequence]] = None) -> RaySet:
    """Extreme rays of {x : a_i^T F x >= 0} (F = identity when ``form`` is None).

    Rays come back primitive, in lexicographic order. With a form given,
    squares and pairwise products are filled in.
    """
    rows = [list(a) for a in inequalities]
    if not rows:
        raise UnsupportedPrecondition("no inequalities: the cone is the whole space")
    if form is not None:
        rows = [linalg.mat_vec(form, a) for a in rows]  # F symmetric
    d = len(rows[0])
    if linalg.rank(rows) < d:
        raise UnsupportedPrecondition("inequality system is not pointed: the cone contains a line")

    init = linalg.independent_rows(rows)
    Binv = linalg.inverse([rows[i] for i in init])
    # ray k: column k of B^{-1}; tight on every initial row but its own
    rays = [[Binv[r][k] for r in range(d)] for k in range(d)]
    tight = [set(init) - {init[k]} for k in range(d)]
    processed = list(init)

    for h in range(len(rows)):
        if h in init:
            continue
        a = rows[h]
        vals = [linalg.dot(a, r) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zero = [k for k, v in enumerate(vals) if v == 0]
        new_rays = [rays[k] for k in pos + zero]
        new_tight = [set(tight[k]) for k in pos] + [tight[k] | {h} for k in zero]
        for p in pos:
            for n in neg:
                common = tight[p] & tight[n]
                if len(common) < d - 2:
                    continue
                if linalg.rank([rows[i] for i in common]) != d - 2:
                    continue
                vp, vn = vals[p], vals[n]
                new_rays.append([vp * x - vn * y for x, y in zip(rays[n], rays[p])])
                new_tight.append(common | {h})
        rays, tight = new_rays, new_tight
        processed.append(h)

    prim = sorted({linalg.primitive(r) for r in rays})
    if form is None:
        return RaySet(tuple(prim))
    return ray_set(prim, form)


def ray_set(rays: Sequence[Ray], form: Sequence[Sequence]) -> RaySet:
    rays = [tuple(r) for r in rays]
    prods = tuple(tuple(int(linalg.bilinear(r, form, s)) for s in rays) for r in rays)
    return RaySet(tuple(rays), tuple(prods[i][i] for i in range(len(rays))), prods)


@dataclass(frozen=True)
class ConeCertificate:
    status: str  # "certified" | "refuted"
    basis: Tuple[str, ...]
    rays: RaySet
    witness: Optional[Ray] = None
    witness_pair: Optional[Tuple[Ray, Ray]] = None
    isotropic_rays: Tuple[Ray, ...] = ()

    @property
    def certified(self) -> bool:
        return self.status == "certified"


def span_coordinates(config: CurveConfiguration):
    """(basis indices, Gram on the basis, inequality rows x.E_i over the basis)."""
    B = config.basis
    F = linalg.submatrix(config.gram, B)
    rows = [[config.gram[b][i] for b in B] for i in range(len(config))]
    return B, F, rows


def nef_rays(config: CurveConfiguration) -> Tuple[List[int], RaySet]:
    B, F, rows = span_coordinates(config)
    plain = extreme_rays(rows)
    return B, ray_set(plain.rays, F)


def certify_fpmc(config: CurveConfiguration) -> ConeCertificate:
    if not config.spans_ambient():
        raise UnsupportedPrecondition("curves do not span the ambient lattice")
    if not config.is_hyperbolic():
        raise UnsupportedPrecondition(
            f"span signature is {config.span_signature()}, not (1, {config.rho - 1}, 0)"
        )
    B, rs = nef_rays(config)
    basis = tuple(config.names[i] for i in B)
    iso = tuple(r for r, s in zip(rs.rays, rs.squares) if s == 0)
    for r, s in zip(rs.rays, rs.squares):
        if s < 0:
            return ConeCertificate("refuted", basis, rs, witness=r, isotropic_rays=iso)
    for i, j in combinations(range(len(rs)), 2):
        if rs.products[i][j] < 0:
            return ConeCertificate(
                "refuted", basis, rs, witness=rs.rays[i],
                witness_pair=(rs.rays[i], rs.rays[j]), isotropic_rays=iso,
            )
    return ConeCertificate("certified", basis, rs, isotropic_rays=iso)


def two_curve_criterion(config: CurveConfiguration) -> bool:
    """Every 2x2 principal Gram block is negative semidefinite."""
    if len(config) != 3:
        raise InputInvalid("two-curve criterion needs exactly three curves")
    g = config.gram
    return all(
        g[i][i] <= 0 and g[j][j] <= 0 and g[i][i] * g[j][j] - g[i][j] ** 2 >= 0
        for i, j in combinations(range(3), 2)
    )


# ---------------------------------------------------------------------------
# almost finite polyhedral check


@dataclass
class AlmostReport:
    delta_E: int
    p_E: int
    bounded_ok: bool
    max_abs_product: Fraction
    R_bound: Optional[int]
    generators_ok: bool
    extremal: List[int] = field(default_factory=list)
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.bounded_ok and self.generators_ok


def _to_span(config: CurveConfiguration, D: Sequence) -> List[Fraction]:
    B, F, _ = span_coordinates(config)
    prods = config.products(D)
    return linalg.mat_vec(linalg.inverse(F), [prods[b] for b in B])


def _extremal_generators(vectors: List[List[Fraction]]) -> List[int]:
    """Indices of the vectors spanning extreme rays of their cone.

    Falls back to every index when the cone is not full-dimensional.
    """
    d = len(vectors[0])
    if linalg.rank(vectors) < d:
        return list(range(len(vectors)))
    dual = extreme_rays(vectors).rays
    if linalg.rank(dual) < d:
        return list(range(len(vectors)))  # cone(vectors) contains a line
    out = []
    seen = set()
    for k, v in enumerate(vectors):
        if all(x == 0 for x in v):
            continue
        key = linalg.primitive(v)
        active = [w for w in dual if linalg.dot(w, v) == 0]
        if active and linalg.rank(active) == d - 1 and key not in seen:
            seen.add(key)
            out.append(k)
    return out


def check_almost_fpmc(
    config: CurveConfiguration,
    r: Sequence,
    declared_generators: Optional[Sequence[Sequence]] = None,
    R_bound: Optional[int] = None,
) -> AlmostReport:
    """Check the three conditions of an almost finite polyhedral Mori cone
    on the listed curves. ``r`` and the generators are divisors over the curves;
    generators default to the curves themselves."""
    rep = validate(config)
    r = [Fraction(x) for x in r]
    prods_r = config.products(r)
    max_abs = max(abs(p) for p in prods_r)
    bounded = R_bound is None or max_abs <= R_bound
    failures = []
    if not bounded:
        failures.append(f"|E.r| reaches {max_abs} > {R_bound}")

    n = len(config)
    if declared_generators is None:
        declared_generators = [[int(i == j) for j in range(n)] for i in range(n)]
    gens = [[Fraction(x) for x in g] for g in declared_generators]
    span = [_to_span(config, g) for g in gens]
    curve_rays = {
        linalg.primitive(_to_span(config, [int(i == j) for j in range(n)]))
        for i in range(n) if config.gram[i][i] < 0
    }
    ext = _extremal_generators(span)
    gens_ok = True
    for k in ext:
        c = gens[k]
        if linalg.primitive(span[k]) in curve_rays:
            continue
        cc = config.pair(c, c)
        cr = config.pair(c, r)
        if cc == 0 and cr == 0:
            continue
        gens_ok = False
        failures.append(f"generator {k}: not an exceptional curve and c.c = {cc}, c.r = {cr}")
    t = rep.invariants
    return AlmostReport(t.delta_E, t.p_E, bounded, max_abs, R_bound, gens_ok, ext, failures)
