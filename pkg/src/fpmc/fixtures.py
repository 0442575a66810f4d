"""Built-in configurations, blow-up scripts and the torsion table."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Sequence, Tuple

from .config import CurveConfiguration
from .errors import InputInvalid


@dataclass(frozen=True)
class FixtureEntry:
    id: str
    payload: Any
    provenance: str


def graph_config(n: int, edges: Sequence[Tuple[int, int]], whites: Sequence[int], label: str) -> CurveConfiguration:
    """Curves E1..En, black vertices of square -2, white of square -1,
    edges meeting once, all rational."""
    G = [[0] * n for _ in range(n)]
    for i in range(n):
        G[i][i] = -1 if (i + 1) in whites else -2
    for a, b in edges:
        G[a - 1][b - 1] = G[b - 1][a - 1] = 1
    return CurveConfiguration(tuple(f"E{i + 1}" for i in range(n)), G, (0,) * n, label=label)


HE8_EDGES = [(10, 9), (9, 8), (8, 7), (7, 6), (6, 5), (5, 4), (4, 3), (3, 2), (4, 1)]
HD8_EDGES = [(11, 10), (10, 7), (7, 1), (7, 5), (5, 3), (3, 2), (2, 6), (6, 4), (6, 8), (8, 9)]
HA8_CYCLE = [1, 4, 7, 2, 5, 8, 3, 6, 9]
# whites on E7, E8, E9: pairwise cycle distance 3, realizable from three lines
HA8_EDGES = [(HA8_CYCLE[i], HA8_CYCLE[(i + 1) % 9]) for i in range(9)] + [(10, 7), (11, 8), (12, 9)]


def three_curve_config(n: int = 1, g: int = 0) -> CurveConfiguration:
    if n < 1 or g < 0:
        raise InputInvalid("three-curve needs n >= 1 and g >= 0")
    return CurveConfiguration(
        ("C", "E0", "F0"),
        [[-n, 1, 0], [1, -1, 1], [0, 1, -1]],
        (g, 0, 0),
        label=f"three-curve n={n} g={g}",
    )


def _chain(lines: List[str], steps: List[List[Tuple[str, int]]], first: int, name: str) -> dict:
    return {
        "name": name,
        "seed": {"kind": "plane", "lines": lines},
        "steps": [
            {"name": f"E{first + k}", "through": [[c, m] for c, m in pts]} for k, pts in enumerate(steps)
        ],
    }


# Blow-up sequences producing the H-graphs, vertices created in increasing order.
HE8_SCRIPT = _chain(
    ["E1"],
    [[("E1", 1)], [("E1", 1), ("E2", 1)], [("E1", 1), ("E3", 1)], [("E4", 1)], [("E5", 1)],
     [("E6", 1)], [("E7", 1)], [("E8", 1)], [("E9", 1)]],
    2, "HE8t-script",
)
HD8_SCRIPT = _chain(
    ["E1", "E2"],
    [[("E1", 1), ("E2", 1)], [("E2", 1)], [("E1", 1), ("E3", 1)], [("E2", 1), ("E4", 1)],
     [("E1", 1), ("E5", 1)], [("E6", 1)], [("E8", 1)], [("E7", 1)], [("E10", 1)]],
    3, "HD8t-script",
)
HA8_SCRIPT = _chain(
    ["E1", "E2", "E3"],
    [[("E1", 1), ("E2", 1)], [("E2", 1), ("E3", 1)], [("E1", 1), ("E3", 1)], [("E2", 1), ("E4", 1)],
     [("E3", 1), ("E5", 1)], [("E1", 1), ("E6", 1)], [("E7", 1)], [("E8", 1)], [("E9", 1)]],
    4, "HA8t-script",
)


@dataclass(frozen=True)
class MWRow:
    fibers: str
    expected: Tuple[int, ...]  # cyclic orders as printed in the table
    printed: str


MW_TABLE: Tuple[MWRow, ...] = (
    MWRow("E8~", (), "(1)"),
    MWRow("D8~", (2,), "Z/2"),
    MWRow("A8~", (3,), "Z/3"),
    MWRow("E7~+A1~", (2,), "Z/2"),
    MWRow("A7~+A1~", (2, 2), "(Z/2)^2"),
    MWRow("E6~+A2~", (3,), "Z/3"),
    MWRow("D5~+A3~", (4,), "Z/4"),
    MWRow("2D4~", (2, 2), "(Z/2)^2"),
    MWRow("2A4~", (5,), "Z/5"),
    MWRow("D6~+2A1~", (2, 2), "(Z/2)^2"),
    MWRow("A5~+A1~+A2~", (3, 2), "Z/3 + Z/2"),
    MWRow("2A3~+2A1~", (4, 2), "Z/4 + Z/2"),
    MWRow("4A2~", (3, 3), "(Z/3)^2"),
)


def _tower(n: int = 3, g: int = 1, k: int = 0) -> dict:
    from .blowup import tower_script

    return tower_script(n, g, k)


_REGISTRY: Dict[str, Tuple[Callable[..., Any], str]] = {
    "three-curve": (three_curve_config, "three curves C_g, E0, F0 on a blown-up ruled surface; params n, g"),
    "HE8t": (lambda: graph_config(10, HE8_EDGES, [10], "HE8t"), "graph HE8~: E8~ plus one (-1)-curve"),
    "HD8t": (lambda: graph_config(11, HD8_EDGES, [9, 11], "HD8t"), "graph HD8~: D8~ plus two (-1)-curves"),
    "HA8t": (
        lambda: graph_config(12, HA8_EDGES, [10, 11, 12], "HA8t"),
        "graph HA8~: A8~ cycle plus three (-1)-curves; reconstructed white attachments",
    ),
    "HE8t-script": (lambda: HE8_SCRIPT, "plane, one line, nine blow-ups"),
    "HD8t-script": (lambda: HD8_SCRIPT, "plane, two lines, nine blow-ups"),
    "HA8t-script": (lambda: HA8_SCRIPT, "plane, three lines, nine blow-ups"),
    "tower": (_tower, "X_k tower blow-up script; params n, g, k"),
    "mw-table": (lambda: MW_TABLE, "reducible fiber types and torsion groups, 13 rows"),
}


def fixture_ids() -> List[str]:
    return list(_REGISTRY)


def fixture(id: str, **params) -> FixtureEntry:
    try:
        factory, note = _REGISTRY[id]
    except KeyError:
        raise InputInvalid(f"unknown fixture {id!r}; known: {', '.join(_REGISTRY)}") from None
    try:
        payload = factory(**params)
    except TypeError as exc:
        raise InputInvalid(f"bad parameters for fixture {id!r}: {exc}") from None
    return FixtureEntry(id, payload, note)
