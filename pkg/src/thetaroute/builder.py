"""Constrained Theta6 and half-Theta6 graph construction."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .errors import PreconditionViolated
from .geom import (
    FAMILIES,
    ConeId,
    Point,
    canonical_triangle,
    cross,
    is_positive_sector,
    point_in_triangle,
    sector_of,
)
from .pslg import Instance


def surd_sign(a, b) -> int:
    """Exact sign of ``a + b*sqrt(3)`` for rational a, b."""
    if a >= 0 and b >= 0:
        return 0 if (a == 0 and b == 0) else 1
    if a <= 0 and b <= 0:
        return -1
    if a > 0:
        return 1 if a * a > 3 * b * b else -1
    return -1 if a * a > 3 * b * b else 1


# Doubled ray and bisector coordinates (x, y/sqrt3), kept integral.
_RX = (2, 1, -1, -2, -1, 1)
_RY3 = (0, 1, 1, 0, -1, -1)
_BX = tuple(_RX[k] + _RX[(k + 1) % 6] for k in range(6))
_BY3 = tuple(_RY3[k] + _RY3[(k + 1) % 6] for k in range(6))


def int_sector(dx: int, dy: int) -> int:
    """Sector of a rational direction (dy != 0 assumed)."""
    steep = dy * dy > 3 * dx * dx
    if dy > 0:
        return 1 if steep else (0 if dx > 0 else 2)
    return 4 if steep else (5 if dx > 0 else 3)


def proj_less(k: int, d1: tuple, d2: tuple) -> bool:
    """Projection of d1 on sector k's bisector is smaller than that of d2."""
    return surd_sign(_BX[k] * (d1[0] - d2[0]), _BY3[k] * (d1[1] - d2[1])) < 0


def proj_sign(k: int, d: tuple) -> int:
    return surd_sign(_BX[k] * d[0], _BY3[k] * d[1])


@dataclass(frozen=True)
class SubconeRef:
    """Subcone ``index`` (counterclockwise within the cone) of a cone at ``apex``."""

    apex: int
    sector: int
    index: int
    family: str = "half_plus"

    @property
    def cone(self) -> ConeId:
        if self.family == "theta6":
            return ConeId.from_sector(self.sector, "theta6")
        if self.family == "half_minus":
            # inverted orientation: labels are those of the opposite sector
            return ConeId.from_sector(self.sector + 3, "half")
        return ConeId.from_sector(self.sector, "half")

    def to_dict(self) -> dict:
        return {"apex": self.apex, "cone": str(self.cone), "sector": self.sector, "index": self.index}


@dataclass(frozen=True)
class Subcone:
    ref: SubconeRef
    cw: Point  # clockwise bounding direction (a ray or a constraint direction)
    ccw: Point


def constraint_dirs_in_sector(inst: Instance, u: int, k: int) -> list[int]:
    """Constraint partners of u whose direction lies in sector k, sorted counterclockwise."""
    pu = inst.vertices[u]
    xs = [x for x in inst.incident[u] if sector_of(inst.vertices[x] - pu) == k]
    return sorted(xs, key=lambda x: _CcwKey(inst.vertices[x] - pu))


class _CcwKey:
    __slots__ = ("d",)

    def __init__(self, d):
        self.d = d

    def __lt__(self, other):
        return cross(self.d, other.d) > 0


def subcones_at(inst: Instance, u: int, sector: int, family: str = "half_plus") -> list[Subcone]:
    from .geom import ray_vector

    k = sector % 6
    pu = inst.vertices[u]
    dirs = [inst.vertices[x] - pu for x in constraint_dirs_in_sector(inst, u, k)]
    bounds = [ray_vector(k)] + dirs + [ray_vector(k + 1)]
    return [Subcone(SubconeRef(u, k, j, family), bounds[j], bounds[j + 1]) for j in range(len(bounds) - 1)]


def subcone_indices(constraint_dirs: list[Point], d: Point) -> tuple[int, ...]:
    """Subcone indices of direction d given the sorted constraint directions of its sector.

    A direction along a constraint belongs to both neighbouring subcones.
    """
    cnt = 0
    on = False
    for c in constraint_dirs:
        cr = cross(c, d)
        if cr > 0:
            cnt += 1
        elif cr == 0:
            on = True
    return (cnt, cnt + 1) if on else (cnt,)


def closest_in_subcone(inst: Instance, sub: SubconeRef) -> int | None:
    """Visible vertex of the subcone with the smallest projection on the cone bisector."""
    u, k = sub.apex, sub.sector
    pu = inst.vertices[u]
    dirs = [inst.vertices[x] - pu for x in constraint_dirs_in_sector(inst, u, k)]
    xs, ys = inst.int_coords
    best, best_d = None, None
    for v in range(inst.n):
        if v == u or not inst.sees(u, v):
            continue
        d = (xs[v] - xs[u], ys[v] - ys[u])
        if int_sector(*d) != k:
            continue
        if sub.index not in subcone_indices(dirs, inst.vertices[v] - pu):
            continue
        if best is None or proj_less(k, d, best_d):
            best, best_d = v, d
    return best


def _choices_at(inst: Instance, u: int, sectors) -> dict[tuple[int, int], int]:
    """Map (sector, subcone index) -> closest visible vertex, for the given sectors of u."""
    xs, ys = inst.int_coords
    pu = inst.vertices[u]
    vis = inst.visibility_matrix[u]
    dirs_by_sector = {}
    for x in inst.incident[u]:
        dirs_by_sector.setdefault(sector_of(inst.vertices[x] - pu), []).append(inst.vertices[x] - pu)
    for k in dirs_by_sector:
        dirs_by_sector[k].sort(key=_CcwKey)
    best: dict[tuple[int, int], tuple[int, tuple]] = {}
    for v in range(inst.n):
        if v == u or not vis[v]:
            continue
        d = (xs[v] - xs[u], ys[v] - ys[u])
        k = int_sector(*d)
        if k not in sectors:
            continue
        cdirs = dirs_by_sector.get(k)
        idx = subcone_indices(cdirs, inst.vertices[v] - pu) if cdirs else (0,)
        for j in idx:
            cur = best.get((k, j))
            if cur is None or proj_less(k, d, cur[1]):
                best[(k, j)] = (v, d)
    return {key: val[0] for key, val in best.items()}


@dataclass(frozen=True, eq=False)
class ThetaGraph:
    instance: Instance
    family: str
    edges: frozenset
    provenance: dict = field(repr=False)
    choices: dict = field(repr=False)  # (u, sector, j) -> v

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {i: [] for i in range(self.instance.n)}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return {k: tuple(sorted(v)) for k, v in adj.items()}

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def weighted(self) -> dict[int, list[tuple[int, float]]]:
        from .geom import dist

        pts = self.instance.vertices
        return {u: [(v, dist(pts[u], pts[v])) for v in nb] for u, nb in self.adjacency.items()}

    def to_dict(self) -> dict:
        prov = {
            f"{a}-{b}": [r.to_dict() for r in refs] for (a, b), refs in sorted(self.provenance.items())
        }
        return {"family": self.family, "edges": [[a, b] for a, b in sorted(self.edges)], "provenance": prov}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def family_sectors(family: str) -> tuple[int, ...]:
    if family == "theta6":
        return tuple(range(6))
    return tuple(k for k in range(6) if is_positive_sector(k, family))


def build(inst: Instance, family: str = "half_plus") -> ThetaGraph:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    sectors = family_sectors(family)
    edges = set()
    prov: dict[tuple[int, int], list[SubconeRef]] = {}
    choices = {}
    for u in range(inst.n):
        for (k, j), v in sorted(_choices_at(inst, u, sectors).items()):
            e = (min(u, v), max(u, v))
            edges.add(e)
            prov.setdefault(e, []).append(SubconeRef(u, k, j, family))
            choices[(u, k, j)] = v
    return ThetaGraph(inst, family, frozenset(edges), {e: tuple(r) for e, r in prov.items()}, choices)


def path_in_triangle_exists(graph: ThetaGraph, u: int, w: int) -> list[int]:
    """A u-w path of the half graph inside the closed canonical triangle of u towards w."""
    inst = graph.instance
    if graph.family == "theta6":
        raise PreconditionViolated("path_in_triangle_exists needs a half-graph")
    if not inst.sees(u, w):
        raise PreconditionViolated(f"{u} and {w} do not see each other")
    pu, pw = inst.vertices[u], inst.vertices[w]
    tri = canonical_triangle(pu, pw, graph.family)
    a, b = tri.a, tri.b
    inside = lambda i: point_in_triangle(inst.vertices[i], pu, b, a, closed=True)
    prev = {u: None}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if x == w:
            break
        for y in graph.neighbors(x):
            if y not in prev and inside(y):
                prev[y] = x
                queue.append(y)
    if w not in prev:
        raise PreconditionViolated(f"no path from {u} to {w} inside their canonical triangle")
    path = [w]
    while path[-1] != u:
        path.append(prev[path[-1]])
    return path[::-1]


__all__ = [
    "Subcone",
    "SubconeRef",
    "ThetaGraph",
    "build",
    "closest_in_subcone",
    "family_sectors",
    "path_in_triangle_exists",
    "subcone_indices",
    "subcones_at",
    "surd_sign",
]
