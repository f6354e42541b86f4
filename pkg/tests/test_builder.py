import math
import random

import pytest

from exact_oracles import crossing_edge_pairs, sees
from thetaroute.builder import (
    SubconeRef,
    build,
    closest_in_subcone,
    path_in_triangle_exists,
    subcones_at,
)
from thetaroute.errors import PreconditionViolated
from thetaroute.geom import P, is_positive_sector, sector_of
from thetaroute.instances import gen_random
from thetaroute.oracles import spanner_check
from thetaroute.pslg import make_instance


def angle(p, q):
    return math.degrees(math.atan2(float(q.y - p.y), float(q.x - p.x))) % 360


def reference_choices(inst, family):
    """(u, sector, subcone index) -> closest vertex, by float angles and float projections."""
    out = {}
    pts = inst.vertices
    for u in range(inst.n):
        for k in range(6):
            if family != "theta6" and not is_positive_sector(k, family):
                continue
            lo = 60 * k
            splits = sorted(angle(pts[u], pts[x]) for x in inst.incident[u] if lo < angle(pts[u], pts[x]) < lo + 60)
            bis = math.radians(lo + 30)
            best = {}
            for v in range(inst.n):
                if v == u or not sees(inst, u, v):
                    continue
                a = angle(pts[u], pts[v])
                if not lo < a < lo + 60:
                    continue
                on_split = v in inst.incident[u]
                j = sum(1 for s in splits if s < a - 1e-9)
                subs = (j, j + 1) if on_split and any(abs(s - a) < 1e-9 for s in splits) else (j,)
                proj = float(pts[v].x - pts[u].x) * math.cos(bis) + float(pts[v].y - pts[u].y) * math.sin(bis)
                for sub in subs:
                    if sub not in best or proj < best[sub][0]:
                        best[sub] = (proj, v)
            for sub, (_, v) in best.items():
                out[(u, k, sub)] = v
    return out


# -- subcones -------------------------------------------------------------


def test_unsplit_cone_has_one_subcone():
    inst = make_instance([(0, 0), (1, 3)])
    subs = subcones_at(inst, 0, 1)
    assert len(subs) == 1 and subs[0].ref.index == 0


def test_one_constraint_splits_cone_in_two():
    inst = make_instance([(0, 0), (0, 5), (1, 3)], [(0, 1)])
    subs = subcones_at(inst, 0, 1)
    assert [s.ref.index for s in subs] == [0, 1]
    assert subs[0].ccw == P(0, 5) == subs[1].cw


def test_two_constraints_sorted_counterclockwise():
    inst = make_instance([(0, 0), ("-1/2", 4), ("1/3", 5), (7, "1/9")], [(0, 1), (0, 2)])
    subs = subcones_at(inst, 0, 1)
    assert len(subs) == 3
    assert subs[1].cw == P("1/3", 5) and subs[1].ccw == P("-1/2", 4)


# -- closest in subcone ---------------------------------------------------


def test_closest_uses_bisector_projection():
    inst = make_instance([(0, 0), ("-2/5", 1), ("2/5", "6/5")])
    assert closest_in_subcone(inst, SubconeRef(0, 1, 0)) == 1


def test_blocked_subcone_has_no_closest():
    inst = make_instance([(0, 0), ("1/10", 3), (-3, 2), (3, "19/10")], [(2, 3)])
    assert closest_in_subcone(inst, SubconeRef(0, 1, 0)) is None


def test_split_cone_yields_one_edge_per_subcone():
    # the constraint towards (1/10, 5) splits the upward cone of the origin
    inst = make_instance([(0, 0), ("1/10", 5), ("-1/5", 2), ("3/10", 3)], [(0, 1)])
    assert closest_in_subcone(inst, SubconeRef(0, 1, 1)) == 2
    assert closest_in_subcone(inst, SubconeRef(0, 1, 0)) == 3
    graph = build(inst, "half_plus")
    assert graph.has_edge(0, 2) and graph.has_edge(0, 3)
    unsplit = build(make_instance(inst.vertices), "half_plus")
    assert not unsplit.has_edge(0, 3)


# -- build ----------------------------------------------------------------


@pytest.mark.parametrize("family", ["theta6", "half_plus", "half_minus"])
def test_two_vertices_give_one_edge(family):
    assert build(make_instance([(0, 0), (1, 3)]), family).edges == {(0, 1)}


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_build_matches_float_reference(seed):
    inst = gen_random(50, "0.2", seed)
    for family in ("half_plus", "half_minus", "theta6"):
        graph = build(inst, family)
        assert graph.choices == reference_choices(inst, family)


@pytest.mark.parametrize("seed", [3, 4])
def test_theta6_is_union_of_half_graphs(seed):
    inst = gen_random(50, "0.1", seed)
    union = build(inst, "half_plus").edges | build(inst, "half_minus").edges
    assert build(inst, "theta6").edges == union


def test_half_graphs_plane_and_made_of_visibility_edges(small_suite):
    for inst, graphs in small_suite.items:
        for family in ("half_plus", "half_minus"):
            g = graphs[family]
            assert crossing_edge_pairs(inst.vertices, g.edges) == 0
            assert all(sees(inst, a, b) for a, b in g.edges)
            for refs in g.provenance.values():
                assert all(is_positive_sector(r.sector, family) for r in refs)


def test_half_graph_is_two_spanner(small_suite):
    for inst, graphs in small_suite.items:
        for family in ("half_plus", "half_minus"):
            assert spanner_check(inst, family, graphs[family]) <= 2 * (1 + 1e-9)


def test_constraints_to_closest_vertices_are_edges():
    inst = gen_random(40, "0.3", 11)
    g = build(inst, "half_plus")
    reference = reference_choices(inst, "half_plus")
    for a, b in inst.constraints:
        for u, v in ((a, b), (b, a)):
            if v in {w for (x, _, _), w in reference.items() if x == u}:
                assert g.has_edge(u, v)


# -- paths inside canonical triangles -------------------------------------


def test_direct_edge_is_its_own_path():
    inst = make_instance([(0, 0), ("1/5", 3)])
    assert path_in_triangle_exists(build(inst), 0, 1) == [0, 1]


def test_path_through_convex_chain():
    # v0 is the closest vertex of the origin; w is reached through the chain v0, v1, w
    inst = make_instance([(0, 0), ("-6/5", 2), ("-1/2", 3), ("1/3", "7/2"), ("7/5", "1/2")])
    g = build(inst, "half_plus")
    assert not g.has_edge(0, 3)
    path = path_in_triangle_exists(g, 0, 3)
    assert path[0] == 0 and path[-1] == 3 and len(path) >= 3


def test_path_in_triangle_rejects_hidden_pairs():
    inst = make_instance([(0, 0), ("1/5", 3), (-1, 2), (1, "19/10")], [(2, 3)])
    with pytest.raises(PreconditionViolated):
        path_in_triangle_exists(build(inst), 0, 1)


def test_paths_stay_in_canonical_triangle():
    rng = random.Random(5)
    found = 0
    while found < 80:
        inst = gen_random(rng.randrange(10, 61), rng.choice(["0", "0.2"]), rng.randrange(10 ** 6))
        g = build(inst, "half_plus")
        for _ in range(10):
            u, w = rng.sample(range(inst.n), 2)
            k = sector_of(inst.vertices[w] - inst.vertices[u])
            if not (inst.sees(u, w) and is_positive_sector(k, "half_plus")):
                continue
            found += 1
            path = path_in_triangle_exists(g, u, w)
            pu, pw = inst.vertices[u], inst.vertices[w]
            bis = math.radians(60 * k + 30)
            limit = float(pw.x - pu.x) * math.cos(bis) + float(pw.y - pu.y) * math.sin(bis)
            for x in path[1:]:
                px = inst.vertices[x]
                a = angle(pu, px)
                assert 60 * k - 1e-9 <= a <= 60 * k + 60 + 1e-9
                proj = float(px.x - pu.x) * math.cos(bis) + float(px.y - pu.y) * math.sin(bis)
                assert proj <= limit + 1e-9
