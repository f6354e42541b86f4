"""Instances (points plus non-crossing constraints), validation and visibility."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import PreconditionViolated
from .geom import (
    Point,
    format_rational,
    orient,
    parse_rational,
    point_in_triangle,
    point_strictly_in_polygon,
    segment_meets_polygon_interior,
    segments_properly_intersect,
)


@dataclass(frozen=True)
class Violation:
    rule: str
    ids: tuple[int, ...]
    detail: str = ""

    def to_dict(self) -> dict:
        return {"rule": self.rule, "ids": list(self.ids), "detail": self.detail}


@dataclass(frozen=True, eq=False)
class Instance:
    """Vertex set P and constraint set S.  Immutable; derived data is cached."""

    vertices: tuple[Point, ...]
    constraints: tuple[tuple[int, int], ...] = ()
    name: str = "instance"

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        pairs = dict.fromkeys((min(a, b), max(a, b)) for a, b in self.constraints)
        object.__setattr__(self, "constraints", tuple(pairs))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def __len__(self):
        return len(self.vertices)

    def point(self, i: int) -> Point:
        return self.vertices[i]

    @cached_property
    def constraint_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.constraints)

    def is_constraint(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.constraint_set

    @cached_property
    def incident(self) -> dict[int, tuple[int, ...]]:
        """Constraint partners of every vertex."""
        out: dict[int, list[int]] = {i: [] for i in range(self.n)}
        for a, b in self.constraints:
            if 0 <= a < self.n and 0 <= b < self.n:
                out[a].append(b)
                out[b].append(a)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def int_coords(self) -> tuple[list[int], list[int]]:
        """Coordinates scaled by a common denominator and shifted to be >= 0."""
        den = 1
        for p in self.vertices:
            den = math.lcm(den, p.x.denominator, p.y.denominator)
        xs = [int(p.x * den) for p in self.vertices]
        ys = [int(p.y * den) for p in self.vertices]
        if xs:
            mx, my = min(xs), min(ys)
            xs = [x - mx for x in xs]
            ys = [y - my for y in ys]
        return xs, ys

    @cached_property
    def visibility_matrix(self) -> np.ndarray:
        return _visibility_matrix(self)

    def sees(self, u: int, v: int) -> bool:
        """Cached visibility lookup (same answer as :func:`visible`)."""
        return bool(self.visibility_matrix[u, v])

    def with_name(self, name: str) -> "Instance":
        return Instance(self.vertices, self.constraints, name)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "vertices": [[format_rational(p.x), format_rational(p.y)] for p in self.vertices],
            "constraints": [[a, b] for a, b in self.constraints],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        verts = tuple(Point(parse_rational(x), parse_rational(y)) for x, y in data["vertices"])
        cons = tuple((int(a), int(b)) for a, b in data.get("constraints", []))
        return cls(verts, cons, data.get("name", "instance"))

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        return cls.from_dict(json.loads(text))


def make_instance(points: Iterable, constraints: Iterable = (), name: str = "instance") -> Instance:
    """Convenience constructor accepting (x, y) pairs of ints, Fractions or literals."""
    verts = []
    for p in points:
        if isinstance(p, Point):
            verts.append(p)
        else:
            x, y = p
            verts.append(Point(parse_rational(x), parse_rational(y)))
    return Instance(tuple(verts), tuple(tuple(c) for c in constraints), name)


# ---------------------------------------------------------------------------
# validation


def validate(inst: Instance) -> list[Violation]:
    """All general-position and constraint violations; empty when the instance is legal."""
    out: list[Violation] = []
    n = inst.n
    pts = inst.vertices
    bad_endpoint = False
    for ci, (a, b) in enumerate(inst.constraints):
        if not (0 <= a < n and 0 <= b < n) or a == b:
            out.append(Violation("constraint_endpoint", (a, b), f"constraint {ci} has invalid endpoints"))
            bad_endpoint = True

    index: dict[Point, int] = {}
    for i, p in enumerate(pts):
        if p in index:
            out.append(Violation("duplicate_vertex", (index[p], i)))
        else:
            index[p] = i
    if any(v.rule == "duplicate_vertex" for v in out):
        return out

    xs, ys = inst.int_coords
    for i in range(n):
        dirs: dict[tuple[int, int], int] = {}
        for j in range(i + 1, n):
            dx, dy = xs[j] - xs[i], ys[j] - ys[i]
            if dy == 0:
                out.append(Violation("ray_parallel", (i, j), "line through the pair is horizontal"))
            g = math.gcd(dx, dy)
            key = (dx // g, dy // g)
            if key[1] < 0 or (key[1] == 0 and key[0] < 0):
                key = (-key[0], -key[1])
            if key in dirs:
                k = dirs[key]
                out.append(Violation("collinear", (i, k, j), "three collinear vertices"))
            else:
                dirs[key] = j

    if not bad_endpoint:
        cons = inst.constraints
        for x in range(len(cons)):
            a, b = cons[x]
            for y in range(x + 1, len(cons)):
                c, d = cons[y]
                if segments_properly_intersect(pts[a], pts[b], pts[c], pts[d]):
                    out.append(Violation("proper_crossing", (a, b, c, d), f"constraints {x} and {y} cross"))
    return out


# ---------------------------------------------------------------------------
# visibility


def visible(inst: Instance, u: int, v: int) -> bool:
    """u sees v: uv is a constraint or crosses no constraint properly."""
    if u == v:
        raise ValueError("visible() needs two distinct vertices")
    if inst.is_constraint(u, v):
        return True
    pu, pv = inst.vertices[u], inst.vertices[v]
    for a, b in inst.constraints:
        if segments_properly_intersect(pu, pv, inst.vertices[a], inst.vertices[b]):
            return False
    return True


def blocking_constraint(inst: Instance, u: int, v: int) -> tuple[int, int] | None:
    if inst.is_constraint(u, v):
        return None
    pu, pv = inst.vertices[u], inst.vertices[v]
    for a, b in inst.constraints:
        if segments_properly_intersect(pu, pv, inst.vertices[a], inst.vertices[b]):
            return (a, b)
    return None


def _sign(a):
    return (a > 0).astype(np.int8) - (a < 0).astype(np.int8)


def _visibility_matrix(inst: Instance) -> np.ndarray:
    n = inst.n
    vis = np.ones((n, n), dtype=bool)
    np.fill_diagonal(vis, False)
    if not inst.constraints or n < 2:
        return vis
    xs, ys = inst.int_coords
    big = max(max(xs), max(ys)) >= (1 << 30)
    dtype = object if big else np.int64
    X = np.array(xs, dtype=dtype)
    Y = np.array(ys, dtype=dtype)
    A = np.array([a for a, _ in inst.constraints])
    B = np.array([b for _, b in inst.constraints])
    ax, ay, bx, by = X[A], Y[A], X[B], Y[B]
    cdx, cdy = bx - ax, by - ay
    # side of every vertex w.r.t. every constraint line, shape (n, m)
    side_v = _sign(cdx[None, :] * (Y[:, None] - ay[None, :]) - cdy[None, :] * (X[:, None] - ax[None, :]))
    for u in range(n - 1):
        vs = np.arange(u + 1, n)
        dx = X[vs] - X[u]
        dy = Y[vs] - Y[u]
        o1 = _sign(dx[:, None] * (ay[None, :] - Y[u]) - dy[:, None] * (ax[None, :] - X[u]))
        o2 = _sign(dx[:, None] * (by[None, :] - Y[u]) - dy[:, None] * (bx[None, :] - X[u]))
        o3 = side_v[u][None, :]
        o4 = side_v[vs]
        cross_ = (o1 * o2 < 0) & (o3 * o4 < 0)
        blocked = cross_.any(axis=1)
        vis[u, vs] = ~blocked
        vis[vs, u] = ~blocked
    for a, b in inst.constraints:
        vis[a, b] = vis[b, a] = True
    return vis


@dataclass(frozen=True, eq=False)
class VisibilityGraph:
    instance: Instance
    adjacency: tuple[tuple[int, ...], ...]

    def edges(self) -> set[tuple[int, int]]:
        return {(u, v) for u, nb in enumerate(self.adjacency) for v in nb if u < v}

    def weighted(self) -> dict[int, list[tuple[int, float]]]:
        from .geom import dist

        pts = self.instance.vertices
        return {u: [(v, dist(pts[u], pts[v])) for v in nb] for u, nb in enumerate(self.adjacency)}


def visibility_graph(inst: Instance) -> VisibilityGraph:
    vis = inst.visibility_matrix
    adj = tuple(tuple(int(v) for v in np.nonzero(vis[u])[0]) for u in range(inst.n))
    return VisibilityGraph(inst, adj)


# ---------------------------------------------------------------------------
# convex chains


def _constraint_hits_triangle_interior(inst: Instance, w: int, u: int, v: int) -> bool:
    """w is the endpoint of a constraint entering the interior of triangle uvw."""
    tri = [inst.vertices[u], inst.vertices[v], inst.vertices[w]]
    for x in inst.incident[w]:
        if x in (u, v):
            continue
        if segment_meets_polygon_interior(tri, inst.vertices[w], inst.vertices[x]):
            return True
    return False


def convex_chain_applicable(inst: Instance, u: int, v: int, w: int) -> bool:
    """Whether (u, v, w) meets the preconditions of :func:`convex_chain`."""
    if len({u, v, w}) < 3 or orient(inst.vertices[u], inst.vertices[v], inst.vertices[w]) == 0:
        return False
    if not (visible(inst, u, w) and visible(inst, v, w)):
        return False
    return not _constraint_hits_triangle_interior(inst, w, u, v)


def convex_chain(inst: Instance, u: int, v: int, w: int) -> list[int]:
    """Convex chain of visibility edges from u to v inside triangle uvw.

    The polygon bounded by uw, wv and the chain contains no vertex and no
    constraint.  Built as the hull side of {u, v} plus the interior vertices
    that faces w, then verified.
    """
    if len({u, v, w}) < 3:
        raise PreconditionViolated("u, v, w must be distinct")
    if not (visible(inst, u, w) and visible(inst, v, w)):
        raise PreconditionViolated("uw and vw must be visibility edges")
    if _constraint_hits_triangle_interior(inst, w, u, v):
        raise PreconditionViolated("w is the endpoint of a constraint entering triangle uvw")
    pts = inst.vertices
    pu, pv, pw = pts[u], pts[v], pts[w]
    side = orient(pu, pv, pw)
    if side == 0:
        raise PreconditionViolated("u, v, w are collinear")
    inside = [i for i in range(inst.n) if i not in (u, v, w) and point_in_triangle(pts[i], pu, pv, pw, closed=False)]
    cand = [u, v] + inside

    chain = [u]
    cur = u
    while cur != v:
        nxt = None
        for q in cand:
            if q == cur:
                continue
            if all(orient(pts[cur], pts[q], pts[p]) != side for p in cand if p not in (cur, q)):
                nxt = q
                break
        if nxt is None or nxt in chain:
            raise PreconditionViolated("could not wrap the chain (degenerate input)")
        chain.append(nxt)
        cur = nxt
    _verify_chain(inst, chain, w, side)
    return chain


def _verify_chain(inst: Instance, chain: list[int], w: int, side: int) -> None:
    pts = inst.vertices
    for a, b in zip(chain, chain[1:]):
        if not visible(inst, a, b):
            raise PreconditionViolated(f"chain edge {a}-{b} is not a visibility edge")
    for a, b, c in zip(chain, chain[1:], chain[2:]):
        if orient(pts[a], pts[b], pts[c]) != -side:
            raise PreconditionViolated("chain is not convex")
    poly = [pts[i] for i in chain] + [pts[w]]
    for i in range(inst.n):
        if point_strictly_in_polygon(poly, pts[i]):
            raise PreconditionViolated(f"vertex {i} lies inside the chain polygon")
    for a, b in inst.constraints:
        if segment_meets_polygon_interior(poly, pts[a], pts[b]):
            raise PreconditionViolated(f"constraint {a}-{b} enters the chain polygon")


def chain_polygon_ok(inst: Instance, chain: list[int], w: int) -> bool:
    """Independent re-check used by tests: emptiness, convexity, visibility."""
    pts = inst.vertices
    side = orient(pts[chain[0]], pts[chain[-1]], pts[w])
    try:
        _verify_chain(inst, chain, w, side)
    except PreconditionViolated:
        return False
    return True


__all__ = [
    "Instance",
    "Violation",
    "VisibilityGraph",
    "blocking_constraint",
    "chain_polygon_ok",
    "convex_chain",
    "convex_chain_applicable",
    "make_instance",
    "validate",
    "visibility_graph",
    "visible",
]
