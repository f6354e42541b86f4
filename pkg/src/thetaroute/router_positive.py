"""1-local positive routing on the constrained half-Theta6 graph, and Theta6 routing on top of it.

Routing decisions are made by :func:`positive_step`, which sees only a
:class:`LocalView`: the current vertex, its neighbours, its incident
constraints, and the source and destination points.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cmp_to_key

from .builder import ThetaGraph, subcone_indices
from .errors import NoCandidateEdge, NotInPositiveCone, NotVisible, PreconditionViolated
from .geom import (
    LEFT,
    Point,
    bisector_dot,
    canonical_triangle_in_sector,
    cross,
    dist,
    is_positive_sector,
    line_intersection,
    orient,
    perpendicular_hit,
    point_in_triangle,
    point_strictly_in_polygon,
    sector_of,
    segment_meets_polygon_interior,
    segments_properly_intersect,
    sgn,
)
from .pslg import Instance, blocking_constraint

IN_G_PLUS = "in_G_plus"
NOT_IN_G_PLUS = "not_in_G_plus"


@dataclass(frozen=True)
class Neighbor:
    id: int
    point: Point
    is_constraint: bool


@dataclass(frozen=True)
class LocalView:
    """Everything a 1-local, memoryless router may look at."""

    current: int
    current_point: Point
    neighbors: tuple[Neighbor, ...]
    incident_constraints: tuple[Point, ...]  # far endpoints of constraints at current
    source: Point
    destination: Point
    rejected: tuple[int, ...] = ()

    def constraint_dirs(self, k: int) -> list[Point]:
        """Directions of incident constraints inside sector k, counterclockwise."""
        u = self.current_point
        ds = [c - u for c in self.incident_constraints if sector_of(c - u) == k]
        return sorted(ds, key=cmp_to_key(lambda a, b: -sgn(cross(a, b))))

    def neighbor(self, vid: int) -> Neighbor:
        for nb in self.neighbors:
            if nb.id == vid:
                return nb
        raise KeyError(vid)

    def with_rejected(self, rejected) -> "LocalView":
        return LocalView(self.current, self.current_point, self.neighbors, self.incident_constraints,
                         self.source, self.destination, tuple(rejected))


def make_view(graph: ThetaGraph, u: int, source: Point, destination: Point) -> LocalView:
    inst = graph.instance
    pts = inst.vertices
    nbs = tuple(Neighbor(v, pts[v], inst.is_constraint(u, v)) for v in graph.neighbors(u))
    inc = tuple(pts[x] for x in inst.incident[u])
    return LocalView(u, pts[u], nbs, inc, source, destination)


@dataclass
class RoutingTrace:
    algorithm: str
    s: int
    t: int
    vertices: list[int]
    step_lengths: list[float]
    total: float
    st_length: float
    crossings: list[Point] = field(default_factory=list)

    @property
    def ratio(self) -> float:
        return self.total / self.st_length if self.st_length else 1.0

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "s": self.s,
            "t": self.t,
            "vertices": list(self.vertices),
            "total": self.total,
            "ratio_to_st": self.ratio,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


# ---------------------------------------------------------------------------
# the routing step


def _closest(view: LocalView, k: int, indices) -> list[Neighbor]:
    """Neighbours in sector k lying in any of the given subcones, nearest first."""
    u = view.current_point
    dirs = view.constraint_dirs(k)
    out = []
    for nb in view.neighbors:
        d = nb.point - u
        if sector_of(d) != k:
            continue
        if set(subcone_indices(dirs, d)) & set(indices):
            out.append(nb)
    out.sort(key=cmp_to_key(lambda a, b: sgn(bisector_dot(k, a.point - b.point))))
    return out


def target_sector(view: LocalView, family: str) -> int:
    sigma = sector_of(view.destination - view.source)
    if not is_positive_sector(sigma, family):
        raise NotInPositiveCone("destination is not in a positive cone of the source")
    return sigma


def start_candidates(view: LocalView, sigma: int) -> list[Neighbor]:
    """Neighbours of the source in the subcone(s) containing the destination, nearest first."""
    d = view.destination - view.source
    idx = subcone_indices(view.constraint_dirs(sigma), d)
    return _closest(view, sigma, idx)


def step_candidates(view: LocalView, sigma: int) -> tuple[int, list[Neighbor]]:
    """Edges the positive router may follow away from the source, best first.

    Returns the side of st the current vertex is on (+1 left, -1 right) and
    the candidates ordered by their angle from the far ray of the adjacent
    negative cone that st passes through.
    """
    s, t, u = view.source, view.destination, view.current_point
    side = orient(s, t, u)
    if side == 0:
        raise PreconditionViolated("current vertex lies on segment st")
    neg = (sigma - side) % 6
    cands = []
    for nb in view.neighbors:
        k = sector_of(nb.point - u)
        if k == sigma:
            cands.append(nb)
        elif k == neg and not segments_properly_intersect(u, nb.point, s, t):
            cands.append(nb)
    cands.sort(key=cmp_to_key(lambda a, b: -side * sgn(cross(a.point - u, b.point - u))))
    return side, cands


def positive_step(view: LocalView, family: str = "half_plus") -> int:
    """Next vertex of the positive routing algorithm, computed from the local view only."""
    sigma = target_sector(view, family)
    if view.current_point == view.source:
        cands = start_candidates(view, sigma)
    else:
        _, cands = step_candidates(view, sigma)
    if not cands:
        raise NoCandidateEdge(f"no admissible edge at vertex {view.current}")
    return cands[0].id


# ---------------------------------------------------------------------------
# full routes


def _check_pair(inst: Instance, family: str, s: int, t: int) -> int:
    if s == t:
        raise PreconditionViolated("source equals destination")
    if not inst.sees(s, t):
        blk = blocking_constraint(inst, s, t)
        raise NotVisible(f"{s} and {t} do not see each other (blocked by constraint {blk})")
    sigma = sector_of(inst.vertices[t] - inst.vertices[s])
    if not is_positive_sector(sigma, family):
        raise NotInPositiveCone(f"{t} is not in a positive cone of {s} for {family}")
    return sigma


def _finish_trace(inst: Instance, algorithm: str, s: int, t: int, path: list[int]) -> RoutingTrace:
    pts = inst.vertices
    steps = [dist(pts[a], pts[b]) for a, b in zip(path, path[1:])]
    ps, pt = pts[s], pts[t]
    crossings = [
        line_intersection(pts[a], pts[b], ps, pt)
        for a, b in zip(path, path[1:])
        if segments_properly_intersect(pts[a], pts[b], ps, pt)
    ]
    return RoutingTrace(algorithm, s, t, path, steps, math.fsum(steps), dist(ps, pt), crossings)


def route_positive(inst: Instance, graph: ThetaGraph, s: int, t: int) -> RoutingTrace:
    family = graph.family
    if family == "theta6":
        raise PreconditionViolated("route_positive runs on a half-graph; use route_theta6")
    _check_pair(inst, family, s, t)
    ps, pt = inst.vertices[s], inst.vertices[t]
    path = [s]
    while path[-1] != t:
        if len(path) > inst.n:
            raise NoCandidateEdge("positive routing did not terminate")
        nxt = positive_step(make_view(graph, path[-1], ps, pt), family)
        path.append(nxt)
    return _finish_trace(inst, "positive", s, t, path)


# ---------------------------------------------------------------------------
# invariant oracle


def invariant_polygon(inst: Instance, path: list[int], s: int, t: int) -> list[Point]:
    """Polygon x, v0, ..., vk, x' for the current prefix of a positive route."""
    pts = inst.vertices
    ps, pt = pts[s], pts[t]
    sigma = sector_of(pt - ps)
    x = ps
    start = 0
    for i, (a, b) in enumerate(zip(path, path[1:])):
        if segments_properly_intersect(pts[a], pts[b], ps, pt):
            x = line_intersection(pts[a], pts[b], ps, pt)
            start = i + 1
    chain = [pts[v] for v in path[start:]]
    if start == 0:
        chain = chain[1:] if chain and chain[0] == ps else chain
    last = pts[path[-1]]
    x2 = perpendicular_hit(ps, pt, last, sigma)
    return [x] + chain + [x2]


def invariant_check(path: list[int], inst: Instance, s: int, t: int) -> bool:
    """The region between the route prefix and st holds no vertex and no constraint."""
    if len(path) < 2:
        return True
    poly = invariant_polygon(inst, path, s, t)
    fl = [(float(p.x), float(p.y)) for p in poly]
    lox = min(p[0] for p in fl) - 1e-9
    hix = max(p[0] for p in fl) + 1e-9
    loy = min(p[1] for p in fl) - 1e-9
    hiy = max(p[1] for p in fl) + 1e-9
    pts = inst.vertices
    fpts = [p.to_float() for p in pts]
    for i, (fx, fy) in enumerate(fpts):
        if lox <= fx <= hix and loy <= fy <= hiy and point_strictly_in_polygon(poly, pts[i]):
            return False
    for a, b in inst.constraints:
        (ax, ay), (bx, by) = fpts[a], fpts[b]
        if max(ax, bx) < lox or min(ax, bx) > hix or max(ay, by) < loy or min(ay, by) > hiy:
            continue
        if segment_meets_polygon_interior(poly, pts[a], pts[b]):
            return False
    return True


def in_canonical_triangle(inst: Instance, s: int, t: int, v: int) -> bool:
    pts = inst.vertices
    tri = canonical_triangle_in_sector(pts[s], pts[t], sector_of(pts[t] - pts[s]))
    return point_in_triangle(pts[v], pts[s], tri.b, tri.a, closed=True)


def unfolded_bound(inst: Instance, s: int, t: int) -> float:
    """max(|sa| + |at|, |sa| + |bt|) for the upper corners a, b of the canonical triangle of s, t."""
    pts = inst.vertices
    tri = canonical_triangle_in_sector(pts[s], pts[t], sector_of(pts[t] - pts[s]))
    sa = dist(pts[s], tri.a)
    return max(sa + dist(tri.a, pts[t]), sa + dist(tri.b, pts[t]))


# ---------------------------------------------------------------------------
# Theta6: local membership test for the half-graph that contains the route


def classify_edge(view: LocalView, v: int, family: str) -> str:
    """Decide from the Theta6 neighbourhood of the current vertex whether uv belongs to ``family``."""
    u = view.current_point
    nb = view.neighbor(v)
    d = nb.point - u
    k = sector_of(d)
    dirs = view.constraint_dirs(k)
    idx = subcone_indices(dirs, d)
    closest_in = {}
    for j in idx:
        near = _closest(view, k, (j,))
        closest_in[j] = near[0].id if near else None
    is_closest = any(closest_in[j] == v for j in idx)
    if is_positive_sector(k, family):
        return IN_G_PLUS if is_closest else NOT_IN_G_PLUS
    if not is_closest:
        return IN_G_PLUS
    if nb.is_constraint:
        return IN_G_PLUS
    side = orient(view.source, view.destination, u)
    if side == 0:
        side = LEFT
    a_sector = (k + side) % 6
    # a constraint of u between uv and region A hides A from v
    for c in dirs:
        if side * sgn(cross(d, c)) > 0:
            return IN_G_PLUS
    a_dirs = view.constraint_dirs(a_sector)
    a_index = 0 if side > 0 else len(a_dirs)
    near = _closest(view, a_sector, (a_index,))
    if not near:
        return IN_G_PLUS
    x = near[0].point
    in_a = sector_of(x - nb.point) == (k + 3) % 6
    return NOT_IN_G_PLUS if in_a else IN_G_PLUS


@dataclass
class Theta6Route:
    trace: RoutingTrace
    family: str
    evaluations: list[tuple[int, int, str]]  # (u, v, verdict) in evaluation order


def route_theta6(inst: Instance, graph: ThetaGraph, s: int, t: int) -> Theta6Route:
    """Route on the Theta6 graph by running the positive router on the half-graph containing t."""
    if graph.family != "theta6":
        raise PreconditionViolated("route_theta6 needs the Theta6 graph")
    pts = inst.vertices
    sigma = sector_of(pts[t] - pts[s])
    family = "half_plus" if is_positive_sector(sigma, "half_plus") else "half_minus"
    _check_pair(inst, family, s, t)
    ps, pt = pts[s], pts[t]
    path = [s]
    evals: list[tuple[int, int, str]] = []
    while path[-1] != t:
        if len(path) > inst.n:
            raise NoCandidateEdge("Theta6 routing did not terminate")
        u = path[-1]
        view = make_view(graph, u, ps, pt)
        cands = start_candidates(view, sigma) if u == s else step_candidates(view, sigma)[1]
        rejected: list[int] = []
        chosen = None
        for nb in cands:
            verdict = classify_edge(view.with_rejected(rejected), nb.id, family)
            evals.append((u, nb.id, verdict))
            if verdict == IN_G_PLUS:
                chosen = nb.id
                break
            rejected.append(nb.id)
        if chosen is None:
            raise NoCandidateEdge(f"no half-graph edge found at vertex {u}")
        path.append(chosen)
    trace = _finish_trace(inst, "theta6", s, t, path)
    return Theta6Route(trace, family, evals)


__all__ = [
    "IN_G_PLUS",
    "NOT_IN_G_PLUS",
    "LocalView",
    "Neighbor",
    "RoutingTrace",
    "Theta6Route",
    "classify_edge",
    "in_canonical_triangle",
    "invariant_check",
    "invariant_polygon",
    "make_view",
    "positive_step",
    "route_positive",
    "route_theta6",
    "start_candidates",
    "step_candidates",
    "unfolded_bound",
]
