"""O(1)-memory 1-local routing towards a destination in a negative cone of the source.

The router walks the subgraph G of the half-graph (edges that bound the last
region of their upper endpoint, minus three locally detectable exclusions)
and searches the two candidate paths below each anchor with a doubling
budget.  Vertices of in-degree 2 in G lie on the positive route from t to s
and become new anchors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from functools import cmp_to_key

from .builder import ThetaGraph
from .errors import NotInPositiveCone, NotVisible, PreconditionViolated, StuckAtAnchor
from .geom import (
    Point,
    bisector_dot,
    canonical_triangle_in_sector,
    cross,
    dist,
    is_positive_sector,
    orient,
    point_in_triangle,
    ray_vector,
    sector_of,
    segments_properly_intersect,
    sgn,
)
from .pslg import Instance, blocking_constraint
from .router_positive import LocalView, RoutingTrace, make_view, positive_step

ADVANCING, BACKTRACKING, SWITCHING = "advancing", "backtracking", "switching"


# ---------------------------------------------------------------------------
# exact clipping of segment st against convex regions


def _clip(s: Point, t: Point, halfplanes) -> tuple | None:
    """Open parameter interval of s + lam (t - s), lam in [0, 1], inside all half-planes.

    Each half-plane is ``(q, d)`` meaning ``cross(d, p - q) > 0``.
    """
    lo, hi = 0, 1
    st = t - s
    for q, d in halfplanes:
        c0 = cross(d, s - q)
        c1 = cross(d, st)
        sg = sgn(c1)
        if sg == 0:
            if sgn(c0) <= 0:
                return None
            continue
        r = -c0 / c1
        if sg > 0:
            if sgn(r - lo) > 0:
                lo = r
        elif sgn(r - hi) < 0:
            hi = r
        if sgn(hi - lo) <= 0:
            return None
    return lo, hi


def _wedge(v: Point, cw: Point, ccw: Point):
    """Half-planes of the open wedge at v from direction cw counterclockwise to ccw (< 180 deg)."""
    return [(v, cw), (v, -ccw)]


# ---------------------------------------------------------------------------
# last region and the graph G


@dataclass(frozen=True)
class LastRegion:
    vertex: int
    ordered_neighbors: tuple[int, ...]
    kind: str  # "triangle", "left" or "right"
    position: int  # i for triangle (u_i, u_i+1); 0 for left; k for right
    edges: tuple[int, ...]  # neighbours whose edge to vertex bounds the region


def _geometry(view: LocalView):
    s, t = view.source, view.destination
    tau = sector_of(t - s)
    up = (tau + 3) % 6  # cone of t containing s
    return s, t, tau, up


def lower_neighbors(view: LocalView) -> list:
    """Neighbours closer to t along the bisector of t's cone towards s, counterclockwise from the left."""
    s, t, tau, up = _geometry(view)
    v = view.current_point
    lows = [nb for nb in view.neighbors if sgn(bisector_dot(up, nb.point - v)) < 0]
    lows.sort(key=cmp_to_key(lambda a, b: -sgn(cross(a.point - v, b.point - v))))
    return lows


def _region_list(view: LocalView, lows) -> list[tuple[str, int, tuple[int, ...], list]]:
    """All k+1 regions around the current vertex as (kind, position, edge ends, half-planes)."""
    s, t, tau, up = _geometry(view)
    v = view.current_point
    right = ray_vector(tau + 2)  # "horizontal", pointing right when t is below s
    u0, uk = lows[0].point, lows[-1].point
    regions = [("left", 0, (lows[0].id,), [(v, -right), (u0, right), (v, -(u0 - v))])]
    for i in range(len(lows) - 1):
        a, b = lows[i].point, lows[i + 1].point
        inward = orient(a, b, v)
        regions.append(("triangle", i, (lows[i].id, lows[i + 1].id),
                        [(v, a - v), (v, -(b - v)), (a, (b - a).scale(inward))]))
    regions.append(("right", len(lows) - 1, (lows[-1].id,), [(v, -right), (uk, right), (v, uk - v)]))
    return regions


def _region_halfplanes(view: LocalView, region: "LastRegion") -> list:
    lows = lower_neighbors(view)
    for kind, pos, edges, hps in _region_list(view, lows):
        if kind == region.kind and pos == region.position:
            return hps
    raise ValueError("region does not belong to this view")


def last_region(view: LocalView) -> LastRegion | None:
    """Region around the current vertex through which st passes last, if any."""
    s, t = view.source, view.destination
    lows = lower_neighbors(view)
    if not lows:
        return None
    best = None
    for kind, pos, edges, hps in _region_list(view, lows):
        iv = _clip(s, t, hps)
        if iv is None:
            continue
        if best is None or sgn(iv[1] - best[0][1]) > 0:
            best = (iv, kind, pos, edges)
    if best is None:
        return None
    _, kind, pos, edges = best
    return LastRegion(view.current, tuple(nb.id for nb in lows), kind, pos, edges)


def _region_corner(view: LocalView, region: LastRegion) -> tuple[Point, Point]:
    """Bounding directions (cw, ccw) of the region's angle at the current vertex."""
    s, t, tau, up = _geometry(view)
    v = view.current_point
    right = ray_vector(tau + 2)
    pts = {nb.id: nb.point for nb in view.neighbors}
    if region.kind == "left":
        return -right, pts[region.edges[0]] - v
    if region.kind == "right":
        return pts[region.edges[0]] - v, right
    return pts[region.edges[0]] - v, pts[region.edges[1]] - v


def _region_probe(view: LocalView, region: LastRegion) -> Point:
    """A point of st inside the last region, seen from the current vertex."""
    s, t = view.source, view.destination
    iv = _clip(s, t, _region_halfplanes(view, region))
    lam = (iv[0] + iv[1]) / 2
    return s + (t - s).scale(lam) - view.current_point


def _separated(d: Point, probe: Point, constraint_dirs) -> bool:
    """Some constraint direction lies strictly between direction d and the probe direction."""
    return any(sgn(cross(d, c)) != 0 and sgn(cross(d, c)) == sgn(cross(c, probe)) for c in constraint_dirs)


def g_incoming_edges(view: LocalView, s: Point | None = None, t: Point | None = None) -> list[tuple[int, int]]:
    """Edges of G entering the current vertex, as (neighbour, side of st)."""
    if s is not None or t is not None:
        view = LocalView(view.current, view.current_point, view.neighbors, view.incident_constraints,
                         s if s is not None else view.source, t if t is not None else view.destination,
                         view.rejected)
    s, t, tau, up = _geometry(view)
    v = view.current_point
    tri = canonical_triangle_in_sector(t, s, up)
    in_tri = lambda p: point_in_triangle(p, t, tri.b, tri.a, closed=True)
    if not in_tri(v):
        return []
    for nb in view.neighbors:
        if v == s and nb.point == t:
            # st runs along this edge, between two regions
            return [(nb.id, 0)]
    region = last_region(view)
    if region is None:
        return []
    corner_cw, corner_ccw = _region_corner(view, region)
    inside = [
        c - v for c in view.incident_constraints
        if sgn(cross(corner_cw, c - v)) > 0 and sgn(cross(corner_ccw, c - v)) < 0
    ]
    probe = _region_probe(view, region)
    side_cones = ((tau - 1) % 6, (tau + 1) % 6)
    out = []
    for uid in region.edges:
        u = view.neighbor(uid).point
        if not in_tri(u):
            continue
        d = u - v
        k = sector_of(d)
        if k in side_cones:
            if segments_properly_intersect(v, u, s, t):
                continue
            cone = _clip(s, t, _wedge(v, ray_vector(k), ray_vector(k + 1)))
            if cone is not None:
                continue
        if inside and _separated(d, probe, inside):
            continue
        out.append((uid, orient(s, t, u)))
    if len(out) == 2 and 0 in (out[0][1], out[1][1]):
        # t lies on st; searching it means searching the side the other edge does not cover
        other = out[0][1] or out[1][1]
        out = [(uid, side or -other) for uid, side in out]
    return out


def in_degree(view: LocalView, s: Point | None = None, t: Point | None = None) -> int:
    return len(g_incoming_edges(view, s, t))


# ---------------------------------------------------------------------------
# search state


@dataclass(frozen=True)
class SearchMemory:
    """The whole memory carried by the message; its size does not depend on n."""

    anchor: int
    side: int  # +1 left of st, -1 right
    budget: float  # math.inf once the search is committed to one side
    spent: float
    phase: str


MEMORY_FIELDS = tuple(f.name for f in fields(SearchMemory))


@dataclass(frozen=True)
class Action:
    kind: str  # "advance", "backtrack", "deliver"
    target: int | None = None


def _reverse_view(view: LocalView) -> LocalView:
    return LocalView(view.current, view.current_point, view.neighbors, view.incident_constraints,
                     view.destination, view.source)


def _start_search(view: LocalView, anchor: int) -> SearchMemory:
    inc = g_incoming_edges(view)
    if not inc:
        raise StuckAtAnchor(f"anchor {anchor} has no candidate edge")
    v = view.current_point
    if len(inc) == 1:
        return SearchMemory(anchor, inc[0][1], math.inf, 0.0, SWITCHING)
    lens = [(dist(v, view.neighbor(u).point), side) for u, side in inc]
    lens.sort()
    return SearchMemory(anchor, lens[0][1], lens[0][0], 0.0, ADVANCING)


def dead_end_check(view_at_u: LocalView, came_from: int, family: str) -> bool:
    """True iff the positive router, run from t towards s, would leave u along the edge just walked."""
    return positive_step(_reverse_view(view_at_u), family) == came_from


def negative_step(view: LocalView, mem: SearchMemory, family: str, *, arrived_from: int | None = None):
    """One decision of the walker at the current vertex.

    ``arrived_from`` is the vertex the message just came from when it moved
    forward along an edge of G (used for the dead-end test); it is ``None``
    after a backtrack.  Returns ``(Action, SearchMemory)``.  Backtracking retraces
    the message's own route back to the anchor and is executed by the caller.
    """
    v = view.current
    if view.current_point == view.destination:
        return Action("deliver"), mem
    if mem.phase == BACKTRACKING:
        if v != mem.anchor:
            return Action("backtrack"), mem
        phase = SWITCHING if math.isinf(mem.budget) else ADVANCING
        mem = SearchMemory(mem.anchor, -mem.side, mem.budget, 0.0, phase)
    # edges leaving an anchor are not checked: the anchor's two branches are searched as equals
    if v != mem.anchor and arrived_from not in (None, mem.anchor):
        if not dead_end_check(view, arrived_from, family):
            return _dead_end(mem, v)
    inc = g_incoming_edges(view)
    if v != mem.anchor:
        if len(inc) == 2:
            mem = _start_search(view, v)
        elif not inc:
            return _dead_end(mem, v)
    while True:
        cands = [e for e in inc if e[1] == mem.side] or inc if v == mem.anchor else inc
        nxt = cands[0][0]
        step = dist(view.current_point, view.neighbor(nxt).point)
        if mem.phase != ADVANCING or mem.spent + step <= mem.budget:
            break
        if v != mem.anchor:
            return Action("backtrack"), SearchMemory(mem.anchor, mem.side, 2 * mem.budget, mem.spent, BACKTRACKING)
        # not even the first edge fits: double and try the other side without moving
        mem = SearchMemory(mem.anchor, -mem.side, 2 * mem.budget, 0.0, ADVANCING)
    return Action("advance", nxt), SearchMemory(mem.anchor, mem.side, mem.budget, mem.spent + step, mem.phase)


def _dead_end(mem: SearchMemory, v: int):
    if mem.phase == SWITCHING:
        raise StuckAtAnchor(f"dead end at {v} after committing to one side of anchor {mem.anchor}")
    return Action("backtrack"), SearchMemory(mem.anchor, mem.side, math.inf, mem.spent, BACKTRACKING)


# ---------------------------------------------------------------------------
# full route


@dataclass
class NegativeTrace(RoutingTrace):
    delivered: list[int] = field(default_factory=list)
    delivered_length: float = 0.0
    restarts: list[int] = field(default_factory=list)
    backtracks: int = 0
    segment_travel: list[tuple[int, int, float]] = field(default_factory=list)  # (p, q, travel)
    memory_log: list[SearchMemory] = field(default_factory=list)

    @property
    def travel_total(self) -> float:
        return self.total

    def visited_order(self) -> list[int]:
        """Vertices in order of first visit."""
        seen, out = set(), []
        for v in self.vertices:
            if v not in seen:
                seen.add(v)
                out.append(v)
        return out

    def to_dict(self) -> dict:
        d = super().to_dict()
        d.update({
            "travel_total": self.total,
            "delivered_length": self.delivered_length,
            "delivered": list(self.delivered),
            "restarts": list(self.restarts),
            "backtracks": self.backtracks,
        })
        return d


def _loop_erase(walk: list[int]) -> list[int]:
    out: list[int] = []
    pos: dict[int, int] = {}
    for v in walk:
        if v in pos:
            cut = pos[v]
            for w in out[cut + 1:]:
                del pos[w]
            out = out[:cut + 1]
        else:
            pos[v] = len(out)
            out.append(v)
    return out


def route_negative(inst: Instance, graph: ThetaGraph, s: int, t: int, *, max_moves: int | None = None) -> NegativeTrace:
    family = graph.family
    if family == "theta6":
        raise PreconditionViolated("negative routing runs on a half-graph")
    if s == t:
        raise PreconditionViolated("source equals destination")
    if not inst.sees(s, t):
        raise NotVisible(f"{s} and {t} do not see each other (blocked by {blocking_constraint(inst, s, t)})")
    pts = inst.vertices
    ps, pt = pts[s], pts[t]
    if is_positive_sector(sector_of(pt - ps), family):
        raise NotInPositiveCone(f"{t} lies in a positive cone of {s}; use positive routing")
    limit = max_moves if max_moves is not None else 50 * inst.n + 100

    walk = [s]
    attempt = [s]  # vertices of the current attempt, from the anchor
    mem = _start_search(make_view(graph, s, ps, pt), s)
    restarts: list[int] = []
    segments: list[tuple[int, int, float]] = []
    seg_start, seg_travel = s, 0.0
    backtracks = 0
    log = [mem]
    arrived_from = None
    while True:
        if len(walk) > limit:
            raise StuckAtAnchor("negative routing exceeded its move limit")
        cur = walk[-1]
        view = make_view(graph, cur, ps, pt)
        prev_anchor = mem.anchor
        action, mem = negative_step(view, mem, family, arrived_from=arrived_from)
        if mem.anchor != prev_anchor:
            restarts.append(mem.anchor)
            segments.append((seg_start, mem.anchor, seg_travel))
            seg_start, seg_travel = mem.anchor, 0.0
            attempt = [mem.anchor]
        log.append(mem)
        if action.kind == "deliver":
            segments.append((seg_start, t, seg_travel))
            break
        if action.kind == "backtrack":
            if len(attempt) > 1 and walk[-1] == attempt[-1]:
                if log[-2].phase != BACKTRACKING:
                    backtracks += 1
                attempt.pop()
                nxt = attempt[-1]
            else:
                raise StuckAtAnchor("backtracking lost its way")
            arrived_from = None
        else:
            nxt = action.target
            attempt.append(nxt)
            arrived_from = cur
        seg_travel += dist(pts[cur], pts[nxt])
        walk.append(nxt)

    steps = [dist(pts[a], pts[b]) for a, b in zip(walk, walk[1:])]
    delivered = _loop_erase(walk)
    dsteps = [dist(pts[a], pts[b]) for a, b in zip(delivered, delivered[1:])]
    return NegativeTrace(
        "negative", s, t, walk, steps, math.fsum(steps), dist(ps, pt), [],
        delivered=delivered, delivered_length=math.fsum(dsteps), restarts=restarts,
        backtracks=backtracks, segment_travel=segments, memory_log=log,
    )


__all__ = [
    "Action",
    "LastRegion",
    "MEMORY_FIELDS",
    "NegativeTrace",
    "SearchMemory",
    "g_incoming_edges",
    "in_degree",
    "last_region",
    "lower_neighbors",
    "negative_step",
    "route_negative",
]
