"""Brute-force references: shortest paths, ratio reports, spanner check."""
from __future__ import annotations

import heapq
import json
import math
import random
from dataclasses import dataclass
from typing import Iterable

from .builder import ThetaGraph, build
from .errors import Unreachable
from .geom import is_positive_sector, sector_of
from .pslg import Instance, visibility_graph

Adjacency = dict[int, list[tuple[int, float]]]


def dijkstra(adj: Adjacency, s: int) -> tuple[dict[int, float], dict[int, int]]:
    """Single-source shortest distances and predecessor map."""
    dist = {s: 0.0}
    prev: dict[int, int] = {}
    done = set()
    heap = [(0.0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in adj.get(u, ()):
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, prev


def shortest_path(adj: Adjacency, s: int, t: int) -> tuple[float, list[int]]:
    dist, prev = dijkstra(adj, s)
    if t not in dist:
        raise Unreachable(f"{t} is not reachable from {s}")
    path = [t]
    while path[-1] != s:
        path.append(prev[path[-1]])
    path.reverse()
    return path_length(adj, path), path


def path_length(adj: Adjacency, path: list[int]) -> float:
    """Length of a path, summed with exact rounding."""
    w: dict[tuple[int, int], float] = {}
    for u in adj:
        for v, x in adj[u]:  # parallel edges: the cheapest one is the one a shortest path uses
            w[(u, v)] = min(x, w.get((u, v), math.inf))
    return math.fsum(w[(a, b)] for a, b in zip(path, path[1:]))


@dataclass(frozen=True)
class RatioReport:
    pair: tuple[int, int]
    algorithm: str
    euclidean: float
    graph_shortest: float
    vis_shortest: float
    routed_total: float
    routed_delivered: float

    @property
    def ratios(self) -> dict[str, float]:
        e = self.euclidean
        return {
            "delivered_over_euclidean": self.routed_delivered / e,
            "total_over_euclidean": self.routed_total / e,
            "total_over_graph": self.routed_total / self.graph_shortest,
            "graph_over_vis": self.graph_shortest / self.vis_shortest,
        }

    def ordering_holds(self, rel: float = 1e-9) -> bool:
        chain = [self.vis_shortest, self.graph_shortest, self.routed_delivered, self.routed_total]
        return all(a <= b * (1 + rel) for a, b in zip(chain, chain[1:]))

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "algorithm": self.algorithm,
            "euclidean": self.euclidean,
            "graph_shortest": self.graph_shortest,
            "vis_shortest": self.vis_shortest,
            "routed_total": self.routed_total,
            "routed_delivered": self.routed_delivered,
            "ratios": self.ratios,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


ALGORITHMS = ("positive", "theta6", "negative")


def pair_filter(inst: Instance, algorithm: str, family: str = "half_plus"):
    """Predicate selecting the (s, t) pairs an algorithm is defined on."""

    def ok(s: int, t: int) -> bool:
        if s == t or not inst.sees(s, t):
            return False
        if algorithm == "theta6":
            return True
        positive = is_positive_sector(sector_of(inst.vertices[t] - inst.vertices[s]), family)
        return positive if algorithm == "positive" else not positive

    return ok


def select_pairs(inst: Instance, keep, *, exhaustive_limit: int = 60, max_pairs: int = 200,
                 seed: int = 0) -> list[tuple[int, int]]:
    """All admissible pairs for small instances, a seeded sample otherwise."""
    n = inst.n
    if n <= exhaustive_limit:
        return [(s, t) for s in range(n) for t in range(n) if keep(s, t)]
    rng = random.Random(seed)
    out: list[tuple[int, int]] = []
    seen = set()
    tries = 0
    while len(out) < max_pairs and tries < 50 * max_pairs:
        tries += 1
        s, t = rng.sample(range(n), 2)
        if (s, t) in seen:
            continue
        seen.add((s, t))
        if keep(s, t):
            out.append((s, t))
    return out


def measure(inst: Instance, algorithm: str = "positive", pairs: Iterable[tuple[int, int]] | None = None, *,
            family: str = "half_plus", seed: int = 0, max_pairs: int = 200,
            graphs: dict[str, ThetaGraph] | None = None) -> list[RatioReport]:
    """Route every admissible pair with the chosen algorithm and compare against the oracles."""
    from .router_negative import route_negative
    from .router_positive import route_positive, route_theta6

    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    keep = pair_filter(inst, algorithm, family)
    if pairs is None:
        pairs = select_pairs(inst, keep, max_pairs=max_pairs, seed=seed)
    else:
        pairs = [p for p in pairs if keep(*p)]
    gname = "theta6" if algorithm == "theta6" else family
    graphs = dict(graphs or {})
    graph = graphs.get(gname) or build(inst, gname)
    gadj = graph.weighted()
    vadj = visibility_graph(inst).weighted()
    reports = []
    for s, t in pairs:
        if algorithm == "positive":
            tr = route_positive(inst, graph, s, t)
            total = delivered = tr.total
        elif algorithm == "theta6":
            tr = route_theta6(inst, graph, s, t).trace
            total = delivered = tr.total
        else:
            tr = route_negative(inst, graph, s, t)
            total, delivered = tr.total, tr.delivered_length
        gsp, _ = shortest_path(gadj, s, t)
        vsp, _ = shortest_path(vadj, s, t)
        reports.append(RatioReport((s, t), algorithm, tr.st_length, gsp, vsp, total, delivered))
    return reports


def spanner_check(inst: Instance, family: str = "half_plus", graph: ThetaGraph | None = None) -> float:
    """Largest ratio, over all connected pairs, of graph distance to visibility-graph distance."""
    graph = graph or build(inst, family)
    gadj = graph.weighted()
    vadj = visibility_graph(inst).weighted()
    worst = 1.0
    for s in range(inst.n):
        gd, _ = dijkstra(gadj, s)
        vd, _ = dijkstra(vadj, s)
        for t, d in vd.items():
            if t == s:
                continue
            g = gd.get(t, math.inf)
            worst = max(worst, g / d)
    return worst


__all__ = [
    "ALGORITHMS",
    "RatioReport",
    "dijkstra",
    "measure",
    "pair_filter",
    "path_length",
    "select_pairs",
    "shortest_path",
    "spanner_check",
]
