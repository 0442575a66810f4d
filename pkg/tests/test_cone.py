from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fpmc import linalg
from fpmc.ample import enumerate_gram, expand, make_ample
from fpmc.cone import certify_fpmc, check_almost_fpmc, extreme_rays, two_curve_criterion
from fpmc.config import CurveConfiguration
from fpmc.errors import InputInvalid, UnsupportedPrecondition
from fpmc.fixtures import three_curve_config, fixture
from oracles import brute_force_rays

REFUTED = CurveConfiguration(("A", "B", "C"), [[-1, 2, 0], [2, -1, 1], [0, 1, -1]], (0, 0, 0))


def test_three_curve_rays():
    c = certify_fpmc(three_curve_config(3, 0))
    assert c.certified
    assert set(c.rays.rays) == {(0, 1, 1), (1, 3, 3), (1, 3, 2)}
    assert sorted(c.rays.squares) == [0, 2, 3]
    assert c.isotropic_rays == ((0, 1, 1),)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7])
@pytest.mark.parametrize("g", [0, 1, 3])
def test_three_curve_family_certified(n, g):
    assert certify_fpmc(three_curve_config(n, g)).certified


def test_refutation_witness():
    c = certify_fpmc(REFUTED)
    assert c.status == "refuted"
    w = c.witness
    assert linalg.primitive(w) in {(2, 1, -3), (-2, -1, 3)}
    assert linalg.bilinear(w, REFUTED.gram, w) == -12


def test_single_inequality_rank_one():
    assert extreme_rays([[1]]).rays == ((1,),)


def test_non_pointed_system_rejected():
    with pytest.raises(UnsupportedPrecondition):
        extreme_rays([[1, 0]])


def test_certify_preconditions():
    with pytest.raises(UnsupportedPrecondition):
        certify_fpmc(CurveConfiguration(("a", "b"), [[-2, 1], [1, -2]], (0, 0)))
    with pytest.raises(UnsupportedPrecondition):
        certify_fpmc(CurveConfiguration(("a", "b"), [[-1, 2], [2, -1]], (0, 0), ambient_rank=3))


@pytest.mark.parametrize("fid", ["HE8t", "HD8t", "HA8t"])
def test_graph_fixtures_certified(fid):
    c = certify_fpmc(fixture(fid).payload)
    assert c.certified and c.isotropic_rays


def test_two_curve_criterion_examples():
    assert two_curve_criterion(three_curve_config(3, 0))
    assert not two_curve_criterion(REFUTED)
    assert two_curve_criterion(CurveConfiguration(("a", "b", "c"), [[-1, 0, 0], [0, -1, 0], [0, 0, -1]], (0, 0, 0)))
    with pytest.raises(InputInvalid):
        two_curve_criterion(CurveConfiguration(("a",), [[-1]], (0,)))


def random_inequalities(rng: random.Random, d: int):
    while True:
        m = rng.randint(d, d + 3)
        A = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(m)]
        if linalg.rank(A) < d:
            continue
        try:
            rs = extreme_rays(A)
        except UnsupportedPrecondition:
            continue
        if rs.rays:
            return A, rs


def test_double_description_matches_brute_force():
    rng = random.Random(7)
    for k in range(60):
        d = 3 if k < 40 else rng.randint(4, 5)
        A, rs = random_inequalities(rng, d)
        assert set(rs.rays) == brute_force_rays(A), A


def test_double_description_round_trip():
    rng = random.Random(11)
    for _ in range(50):
        A, rs = random_inequalities(rng, 3)
        gens = list(rs.rays)
        if len(gens) < 3 or linalg.rank(gens) < 3:
            continue
        facets = extreme_rays(gens).rays  # inequalities cutting out cone(gens)
        assert set(extreme_rays(facets).rays) == set(gens)


def test_rays_are_primitive_and_order_independent():
    c = fixture("HD8t").payload
    base = certify_fpmc(c)
    rng = random.Random(3)
    for _ in range(3):
        perm = list(range(len(c)))
        rng.shuffle(perm)
        p = c.permuted(perm)
        got = certify_fpmc(p)
        # compare rays as divisors: pair them with every curve
        def profile(cfg, cert):
            B = [cfg.names.index(n) for n in cert.basis]
            out = set()
            for r in cert.rays.rays:
                D = [Fraction(0)] * len(cfg)
                for b, x in zip(B, r):
                    D[b] = Fraction(x)
                prods = cfg.products(D)
                out.add(linalg.primitive([prods[cfg.names.index(n)] for n in c.names]))
            return out
        assert profile(c, base) == profile(p, got)
    from math import gcd

    for r in base.rays.rays:
        g = 0
        for x in r:
            g = gcd(g, x)
        assert g == 1


def test_two_curve_criterion_implies_certified():
    for M in enumerate_gram(3, 1):
        c = CurveConfiguration(("a", "b", "c"), M, (0, 0, 0))
        if two_curve_criterion(c):
            assert certify_fpmc(c).certified, M


@pytest.mark.parametrize("fid", ["HE8t", "HD8t"])
def test_certified_implies_ample_positive_on_nef_rays(fid):
    c = fixture(fid).payload
    cert = certify_fpmc(c)
    amp = make_ample(c)
    h = expand(c, amp)
    prods = c.products(h)
    B = c.basis
    for r, s in zip(cert.rays.rays, cert.rays.squares):
        if s == 0:
            continue
        # f.h where f has coordinates r over the basis curves
        assert sum(x * prods[b] for x, b in zip(r, B)) > 0


RULED = CurveConfiguration(("C", "f"), [[-1, 1], [1, 0]], (0, 0))


def test_almost_fpmc_checks():
    ok = check_almost_fpmc(three_curve_config(2, 0), [-2, -3, -2], R_bound=5)
    assert ok.passed and ok.bounded_ok
    assert check_almost_fpmc(three_curve_config(2, 0), [-2, -3, -2], R_bound=0).bounded_ok is False
    # fibre class f is isotropic and orthogonal to r = f
    assert check_almost_fpmc(RULED, [0, 1], declared_generators=[[1, 0], [0, 1]]).passed
    # r = K = -2C - 3f pairs non-trivially with f
    bad = check_almost_fpmc(RULED, [-2, -3], declared_generators=[[1, 0], [0, 1]])
    assert not bad.generators_ok
    # C + 2f has square 3: spacelike, not a curve
    space = check_almost_fpmc(RULED, [0, 1], declared_generators=[[1, 0], [1, 2]])
    assert not space.generators_ok


def test_almost_fpmc_with_isotropic_generator_minus_K():
    he = fixture("HE8t").payload
    from fpmc.config import canonical_class

    K = list(canonical_class(he).coeffs)
    gens = [[int(i == j) for j in range(10)] for i in range(10)] + [[-x for x in K]]
    assert check_almost_fpmc(he, K, declared_generators=gens).passed
