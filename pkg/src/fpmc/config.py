"""Curve configurations: named curve classes with an intersection matrix
and arithmetic genera.

Coordinates of divisors are always taken over the listed curves. When the
configuration has more curves than its Gram rank, computations run on a
maximal independent subset (the *basis*) and the remaining curves are used
as consistency checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from . import linalg
from .errors import AdjunctionInconsistent, InputInvalid, UnsupportedPrecondition

# Upper bound on 2(Ei.Ej)/sqrt(Ei^2 Ej^2), compared in squared form.
PAIR_RATIO_BOUND = 62


@dataclass(frozen=True)
class CurveClass:
    name: str
    self_int: int
    genus: int


@dataclass(frozen=True)
class InvariantTriple:
    rho: int
    delta_E: int
    p_E: int

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.rho, self.delta_E, self.p_E)


@dataclass(frozen=True)
class CurveConfiguration:
    names: Tuple[str, ...]
    gram: Tuple[Tuple[int, ...], ...]
    genera: Tuple[int, ...]
    ambient_rank: Optional[int] = None
    label: str = ""

    def __post_init__(self):
        names = tuple(str(x) for x in self.names)
        object.__setattr__(self, "names", names)
        n = len(names)
        if n == 0:
            raise InputInvalid("configuration has no curves")
        if len(set(names)) != n:
            raise InputInvalid("curve names are not unique")
        if len(self.gram) != n or any(len(row) != n for row in self.gram):
            raise InputInvalid(f"gram must be {n}x{n} to match the curve list")
        gram = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        for i in range(n):
            for j in range(i + 1, n):
                if gram[i][j] != gram[j][i]:
                    raise InputInvalid(f"gram is not symmetric at [{i}][{j}] / [{j}][{i}]")
                if gram[i][j] < 0:
                    raise InputInvalid(
                        f"negative intersection {gram[i][j]} between distinct curves "
                        f"{names[i]} and {names[j]}"
                    )
        if len(self.genera) != n:
            raise InputInvalid("genera length does not match the curve list")
        genera = tuple(int(g) for g in self.genera)
        if any(g < 0 for g in genera):
            raise InputInvalid("genera must be non-negative")
        object.__setattr__(self, "genera", genera)
        if self.ambient_rank is not None and self.ambient_rank < 1:
            raise InputInvalid("ambient_rank must be positive")

    @classmethod
    def from_curves(cls, curves: Sequence[CurveClass], gram, **kw) -> "CurveConfiguration":
        for i, c in enumerate(curves):
            if gram[i][i] != c.self_int:
                raise InputInvalid(
                    f"curve {c.name}: declared self-intersection {c.self_int} "
                    f"differs from gram diagonal {gram[i][i]}"
                )
        return cls(tuple(c.name for c in curves), gram, tuple(c.genus for c in curves), **kw)

    # -- basic accessors

    def __len__(self) -> int:
        return len(self.names)

    @property
    def curves(self) -> List[CurveClass]:
        return [CurveClass(n, self.gram[i][i], g) for i, (n, g) in enumerate(zip(self.names, self.genera))]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputInvalid(f"unknown curve {name!r}") from None

    @property
    def rho(self) -> int:
        return linalg.sym_rank(self.gram)

    @property
    def basis(self) -> List[int]:
        """Indices of a maximal independent subset of curves."""
        return linalg.independent_rows(self.gram)

    def span_gram(self) -> List[List[int]]:
        return linalg.submatrix(self.gram, self.basis)

    def span_signature(self) -> linalg.Signature:
        return linalg.signature(self.span_gram())

    def is_hyperbolic(self) -> bool:
        return self.span_signature().as_tuple() == (1, self.rho - 1, 0)

    def spans_ambient(self) -> bool:
        return self.ambient_rank is None or self.ambient_rank == self.rho

    def products(self, D: Sequence) -> List[Fraction]:
        """D.E_i for every curve, D given by coefficients over the curves."""
        if len(D) != len(self):
            raise InputInvalid("divisor length does not match the curve list")
        return [sum((Fraction(c) * row[i] for c, row in zip(D, self.gram)), Fraction(0)) for i in range(len(self))]

    def pair(self, D1: Sequence, D2: Sequence) -> Fraction:
        return linalg.dot(self.products(D1), [Fraction(x) for x in D2])

    def divisor(self, terms: Dict[str, int]) -> List[Fraction]:
        D = [Fraction(0)] * len(self)
        for name, c in terms.items():
            D[self.index(name)] += c
        return D

    def restrict(self, indices: Sequence[int]) -> "CurveConfiguration":
        return CurveConfiguration(
            tuple(self.names[i] for i in indices),
            linalg.submatrix(self.gram, indices),
            tuple(self.genera[i] for i in indices),
            label=self.label,
        )

    def permuted(self, perm: Sequence[int]) -> "CurveConfiguration":
        return CurveConfiguration(
            tuple(self.names[i] for i in perm),
            linalg.submatrix(self.gram, perm),
            tuple(self.genera[i] for i in perm),
            ambient_rank=self.ambient_rank,
            label=self.label,
        )


@dataclass
class ValidationReport:
    invariants: InvariantTriple
    graph: nx.Graph
    components: List[List[str]]
    warnings: List[str] = field(default_factory=list)


def dual_graph(config: CurveConfiguration, indices: Optional[Sequence[int]] = None) -> nx.Graph:
    """Vertices carry (E^2, p_a); edges carry the intersection number when positive."""
    idx = range(len(config)) if indices is None else indices
    g = nx.Graph()
    for i in idx:
        g.add_node(config.names[i], self_int=config.gram[i][i], genus=config.genera[i])
    for i, j in combinations(idx, 2):
        if config.gram[i][j] > 0:
            g.add_edge(config.names[i], config.names[j], weight=config.gram[i][j])
    return g


def validate(config: CurveConfiguration) -> ValidationReport:
    """Compute (rho, delta_E, p_E), the dual graph and its components.

    Structural checks (symmetry, sign of off-diagonal entries, genera)
    already happen when the configuration is built.
    """
    notes = []
    negative = [-config.gram[i][i] for i in range(len(config)) if config.gram[i][i] < 0]
    if len(negative) < len(config):
        notes.append("some curves have non-negative self-intersection and are not exceptional")
    delta = max(negative, default=0)
    p_E = max(config.genera)
    triple = InvariantTriple(config.rho, delta, p_E)
    if triple.rho < 3:
        notes.append("rho < 3: finite-polyhedral statements are only claimed for rho >= 3")
    if config.ambient_rank is not None and config.ambient_rank > triple.rho:
        notes.append("curves do not span the declared ambient lattice")
    g = dual_graph(config)
    comps = [sorted(c, key=config.names.index) for c in nx.connected_components(g)]
    comps.sort(key=lambda c: config.names.index(c[0]))
    return ValidationReport(triple, g, comps, notes)


@dataclass(frozen=True)
class CanonicalClass:
    coeffs: Tuple[Fraction, ...]
    products: Tuple[Fraction, ...]
    square: Fraction


def _adjunction_rhs(config: CurveConfiguration, i: int) -> int:
    # (E^2 + E.K)/2 + 1 = p_a  =>  E.K = 2 p_a - 2 - E^2
    return 2 * config.genera[i] - 2 - config.gram[i][i]


def canonical_class(config: CurveConfiguration) -> CanonicalClass:
    """Solve adjunction for K as a rational combination of the curves."""
    if not config.spans_ambient():
        raise UnsupportedPrecondition(
            "curves do not span the ambient lattice; K is not determined by adjunction"
        )
    B = config.basis
    A = linalg.submatrix(config.gram, B)
    rhs = [_adjunction_rhs(config, i) for i in B]
    sol = linalg.solve_linear(A, rhs)
    if not sol.is_unique:  # cannot happen for an independent basis
        raise AdjunctionInconsistent("adjunction system on the basis is not uniquely solvable")
    coeffs = [Fraction(0)] * len(config)
    for i, x in zip(B, sol.x):
        coeffs[i] = x
    prods = config.products(coeffs)
    for i in range(len(config)):
        if prods[i] != _adjunction_rhs(config, i):
            twice = config.gram[i][i] + prods[i]
            detail = "odd" if twice.denominator == 1 and twice.numerator % 2 else "inconsistent"
            raise AdjunctionInconsistent(
                f"curve {config.names[i]}: adjunction forces E.K = {prods[i]} "
                f"(E^2 + E.K {detail}), declared genus needs {_adjunction_rhs(config, i)}"
            )
    square = linalg.dot(prods, coeffs)
    return CanonicalClass(tuple(coeffs), tuple(prods), square)


def genus_of(config: CurveConfiguration, D: Sequence, K: Optional[CanonicalClass] = None) -> Fraction:
    K = canonical_class(config) if K is None else K
    D = [Fraction(x) for x in D]
    return (config.pair(D, D) + linalg.dot(K.products, D)) / 2 + 1


@dataclass(frozen=True)
class DivisorCheck:
    square: Fraction
    products: Tuple[Fraction, ...]
    nef_on_listed: bool


def check_divisor(config: CurveConfiguration, D: Sequence) -> DivisorCheck:
    prods = config.products(D)
    square = linalg.dot(prods, [Fraction(x) for x in D])
    return DivisorCheck(square, tuple(prods), all(p >= 0 for p in prods))


@dataclass(frozen=True)
class ExceptionalSubset:
    indices: Tuple[int, ...]
    names: Tuple[str, ...]
    max_ratio_sq: Fraction  # max over pairs of (2 Ei.Ej)^2 / (Ei^2 Ej^2)

    @property
    def max_ratio(self) -> float:
        return float(self.max_ratio_sq) ** 0.5


def _pair_ok(gram, i: int, j: int) -> bool:
    return 4 * gram[i][j] ** 2 < PAIR_RATIO_BOUND ** 2 * gram[i][i] * gram[j][j]


def find_exceptional_subsets(config: CurveConfiguration, first_only: bool = False) -> List[ExceptionalSubset]:
    """Subsets of rho exceptional curves that span, have bounded pairwise
    ratios, and a connected dual graph."""
    gram = config.gram
    rho = config.rho
    exc = [i for i in range(len(config)) if gram[i][i] < 0]
    found = []
    for sub in combinations(exc, rho):
        if not all(_pair_ok(gram, i, j) for i, j in combinations(sub, 2)):
            continue
        if linalg.sym_rank(linalg.submatrix(gram, sub)) != rho:
            continue
        if not nx.is_connected(dual_graph(config, sub)):
            continue
        ratio = max(
            (Fraction(4 * gram[i][j] ** 2, gram[i][i] * gram[j][j]) for i, j in combinations(sub, 2)),
            default=Fraction(0),
        )
        found.append(ExceptionalSubset(sub, tuple(config.names[i] for i in sub), ratio))
        if first_only:
            break
    return found

