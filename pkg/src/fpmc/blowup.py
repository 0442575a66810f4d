"""Blow-ups at the level of Neron-Severi lattices.

A state holds an ambient lattice (the seed lattice plus one <-1> summand
per blow-up), the classes and genera of tracked curves, and the canonical
class. Blowing up a point cited with multiplicities replaces each cited
curve C by its strict transform C - m e and adds K -> K + e.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .config import CurveConfiguration
from .errors import GeometricInconsistency, InputInvalid


@dataclass(frozen=True)
class TrackedCurve:
    coords: Tuple[int, ...]
    genus: int
    exceptional: bool = False


@dataclass(frozen=True)
class SurfaceState:
    gram: Tuple[Tuple[int, ...], ...]
    basis: Tuple[str, ...]
    curves: Tuple[Tuple[str, TrackedCurve], ...]
    K: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def curve(self, name: str) -> TrackedCurve:
        for n, c in self.curves:
            if n == name:
                return c
        raise InputInvalid(f"unknown curve {name!r}")

    @property
    def curve_names(self) -> List[str]:
        return [n for n, _ in self.curves]

    def dot(self, u: Sequence[int], v: Sequence[int]) -> int:
        return int(linalg.bilinear(u, self.gram, v))

    def intersect(self, a: str, b: str) -> int:
        return self.dot(self.curve(a).coords, self.curve(b).coords)

    def K_square(self) -> int:
        return self.dot(self.K, self.K)

    def signature(self) -> linalg.Signature:
        return linalg.signature(self.gram)


def seed_config(kind: str, n: Optional[int] = None, g: Optional[int] = None,
                curves: Optional[Sequence[str]] = None, section: str = "C") -> SurfaceState:
    """``plane``: <1> with lines of class h; ``ruled``: Gram [[-n,1],[1,0]]
    over (section C, fiber f) with fibers of class f."""
    if kind == "plane":
        lines = list(curves) if curves else ["L"]
        tracked = tuple((name, TrackedCurve((1,), 0)) for name in lines)
        return SurfaceState(((1,),), ("h",), tracked, (-3,))
    if kind == "ruled":
        if n is None or g is None or n < 1 or g < 0:
            raise InputInvalid("ruled seed needs n >= 1 and g >= 0")
        fibers = list(curves) if curves else ["f"]
        tracked = ((section, TrackedCurve((1, 0), g)),) + tuple(
            (name, TrackedCurve((0, 1), 0)) for name in fibers
        )
        # K = -2C + (2g - 2 - n) f
        return SurfaceState(((-n, 1), (1, 0)), ("C", "f"), tracked, (-2, 2 * g - 2 - n))
    raise InputInvalid(f"unknown seed kind {kind!r}")


def blow_up(state: SurfaceState, point: Sequence[Tuple[str, int]], name: Optional[str] = None) -> SurfaceState:
    cited: Dict[str, int] = {}
    for cname, m in point:
        m = int(m)
        if m < 1:
            raise InputInvalid(f"multiplicity of {cname} must be >= 1")
        state.curve(cname)
        if cname in cited:
            raise InputInvalid(f"curve {cname} cited twice")
        cited[cname] = m
    names = list(cited)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            have = state.intersect(a, b)
            if cited[a] * cited[b] > have:
                raise GeometricInconsistency(
                    f"{a} and {b} meet with total multiplicity {have} but the point needs "
                    f"{cited[a] * cited[b]}"
                )
    n = state.rank
    name = name or f"e{n}"
    if name in state.curve_names:
        raise InputInvalid(f"curve name {name!r} already in use")
    gram = tuple(row + (0,) for row in state.gram) + (tuple([0] * n + [-1]),)
    curves = []
    for cname, c in state.curves:
        m = cited.get(cname, 0)
        genus = c.genus - m * (m - 1) // 2
        if genus < 0:
            raise GeometricInconsistency(f"{cname} would get negative genus {genus}")
        curves.append((cname, replace(c, coords=c.coords + (-m,), genus=genus)))
    curves.append((name, TrackedCurve(tuple([0] * n + [1]), 0, True)))
    return SurfaceState(gram, state.basis + (name,), tuple(curves), state.K + (1,))


@dataclass(frozen=True)
class ScriptResult:
    config: CurveConfiguration
    state: SurfaceState
    K_products: Tuple[int, ...]  # K.E for the exported curves, from bookkeeping


def _parse_step(step) -> Tuple[Optional[str], List[Tuple[str, int]]]:
    if isinstance(step, dict):
        through = step.get("through")
        if through is None:
            raise InputInvalid("step object needs a 'through' list")
        return step.get("name"), [(str(c), int(m)) for c, m in through]
    return None, [(str(c), int(m)) for c, m in step]


def seed_from_spec(seed: dict) -> SurfaceState:
    kind = seed.get("kind")
    if kind == "plane":
        return seed_config("plane", curves=seed.get("lines"))
    if kind == "ruled":
        return seed_config(
            "ruled", int(seed.get("n", 0)), int(seed.get("g", -1)),
            curves=seed.get("fibers"), section=seed.get("section", "C"),
        )
    raise InputInvalid(f"unknown seed kind {kind!r}")


def run_script(script: dict) -> ScriptResult:
    """Execute ``{"seed": ..., "steps": [...], "track": [...]}``."""
    if "seed" not in script or "steps" not in script:
        raise InputInvalid("script needs 'seed' and 'steps'")
    state = seed_from_spec(script["seed"])
    for k, step in enumerate(script["steps"]):
        name, point = _parse_step(step)
        try:
            state = blow_up(state, point, name or f"e{k + 1}")
        except (GeometricInconsistency, InputInvalid) as exc:
            raise type(exc)(f"step {k}: {exc}") from None
    return export(state, script.get("track"), label=script.get("name", ""))


def export(state: SurfaceState, track: Optional[Sequence[str]] = None, label: str = "") -> ScriptResult:
    names = list(track) if track else state.curve_names
    coords = [state.curve(n).coords for n in names]
    gram = [[state.dot(a, b) for b in coords] for a in coords]
    genera = [state.curve(n).genus for n in names]
    config = CurveConfiguration(tuple(names), gram, tuple(genera), ambient_rank=state.rank, label=label)
    kprod = tuple(state.dot(state.K, c) for c in coords)
    return ScriptResult(config, state, kprod)


def tower_script(n: int, g: int, k: int) -> dict:
    """The X_k tower: blow up a point of a fiber E0 off the section, then
    repeatedly the point where the newest curve meets its neighbor of
    largest square (ties to the older curve), which keeps every curve other
    than the section at square >= -3."""
    steps: List[dict] = [{"name": "F0", "through": [["E0", 1]]}]
    state = blow_up(seed_config("ruled", n, g, curves=["E0"]), [("E0", 1)], "F0")
    for j in range(1, k + 1):
        last = f"F{j - 1}"
        nbrs = [
            c for c in state.curve_names
            if c not in ("C", last) and state.intersect(c, last) > 0
        ]
        # highest square first; among equals the one created earliest
        order = state.curve_names
        nb = max(nbrs, key=lambda c: (state.intersect(c, c), -order.index(c)))
        name = f"F{j}"
        steps.append({"name": name, "through": [[last, 1], [nb, 1]]})
        state = blow_up(state, [(last, 1), (nb, 1)], name)
    return {
        "name": f"tower-n{n}-g{g}-k{k}",
        "seed": {"kind": "ruled", "n": n, "g": g, "section": "C", "fibers": ["E0"]},
        "steps": steps,
    }
