"""One test per acceptance criterion; each records a PASS/FAIL line in the terminal summary."""
import dataclasses
import inspect
import math
import random
import time
from fractions import Fraction

import pytest

from exact_oracles import chain_is_valid, crossing_edge_pairs, sees
from thetaroute.builder import build, closest_in_subcone, path_in_triangle_exists, subcones_at
from thetaroute.geom import is_positive_sector, sector_of
from thetaroute.instances import (
    LITERAL_DOUBLINGS,
    GridParams,
    WorstCaseParams,
    gen_lower_bound_grid,
    gen_negative_worst_case,
    gen_random,
)
from thetaroute.oracles import shortest_path, spanner_check
from thetaroute.pslg import convex_chain, convex_chain_applicable, validate
from thetaroute.router_negative import MEMORY_FIELDS, SearchMemory, negative_step, route_negative
from thetaroute.router_positive import (
    IN_G_PLUS,
    NOT_IN_G_PLUS,
    LocalView,
    invariant_check,
    positive_step,
    route_positive,
    route_theta6,
    unfolded_bound,
)

REL = 1e-9
PAIRS_PER_INSTANCE = 25


@pytest.fixture(scope="module")
def positive_runs(random_suite):
    """Route 25 positive pairs on each of the 20 suite instances, timing the routing alone."""
    runs, errors = [], []
    start = time.perf_counter()
    for inst, g, s, t in random_suite.pairs("positive", PAIRS_PER_INSTANCE, seed=1):
        try:
            runs.append((inst, s, t, route_positive(inst, g, s, t)))
        except Exception as exc:  # recorded, then reported by the step-existence criterion
            errors.append((inst.name, s, t, repr(exc)))
    return runs, errors, time.perf_counter() - start


def test_positive_routing_is_two_competitive(positive_runs, random_suite, report_criterion):
    runs, errors, elapsed = positive_runs
    worst = max(tr.total / tr.st_length for *_, tr in runs)
    ok = (len(runs) >= 500 and len(random_suite.items) >= 20 and not errors
          and worst <= 2 * (1 + REL) and elapsed < 60)
    report_criterion("positive routing within 2|st|", ok,
                     f"{len(runs)} pairs on {len(random_suite.items)} instances, max ratio {worst:.6f}, "
                     f"routing time {elapsed:.1f}s")
    assert ok


def test_positive_routing_within_unfolded_bound(positive_runs, report_criterion):
    runs, _, _ = positive_runs
    slack = max(tr.total / unfolded_bound(inst, s, t) for inst, s, t, tr in runs)
    ok = slack <= 1 + REL
    report_criterion("positive routing within unfolded corner bound", ok,
                     f"{len(runs)} pairs, max routed/bound {slack:.6f}")
    assert ok


def test_positive_step_always_exists_and_region_stays_empty(positive_runs, report_criterion):
    runs, errors, _ = positive_runs
    prefixes = failures = 0
    for inst, s, t, tr in runs:
        for i in range(2, len(tr.vertices) + 1):
            prefixes += 1
            failures += not invariant_check(tr.vertices[:i], inst, s, t)
    ok = not errors and failures == 0
    report_criterion("positive step existence and empty invariant region", ok,
                     f"{len(errors)} step errors, {failures} failing of {prefixes} prefixes")
    assert ok


def test_theta6_membership_test_matches_provenance(random_suite, report_criterion):
    runs = evaluated = disagree = mismatched = 0
    for inst, graphs in random_suite.items:
        rng = random.Random(inst.n * 7 + len(inst.constraints))
        done = 0
        while done < 10:
            s, t = rng.sample(range(inst.n), 2)
            if not inst.sees(s, t):
                continue
            done += 1
            res = route_theta6(inst, graphs["theta6"], s, t)
            half = graphs[res.family]
            runs += 1
            for u, v, verdict in res.evaluations:
                evaluated += 1
                disagree += verdict != (IN_G_PLUS if half.has_edge(u, v) else NOT_IN_G_PLUS)
            mismatched += res.trace.vertices != route_positive(inst, half, s, t).vertices
    ok = runs >= 200 and disagree == 0 and mismatched == 0
    report_criterion("Theta6 local membership test matches builder", ok,
                     f"{runs} runs, {evaluated} evaluated edges, {disagree} disagreements, "
                     f"{mismatched} trace mismatches")
    assert ok


def test_negative_routing_bounds(random_suite, report_criterion):
    pairs = errors = 0
    worst_delivered = worst_travel = worst_segment = 0.0
    for inst, g, s, t in random_suite.pairs("negative", PAIRS_PER_INSTANCE, seed=2):
        pairs += 1
        try:
            tr = route_negative(inst, g, s, t)
            back = route_positive(inst, g, t, s).vertices
        except Exception:
            errors += 1
            continue
        worst_delivered = max(worst_delivered, tr.delivered_length / tr.st_length)
        worst_travel = max(worst_travel, tr.total / tr.st_length)
        pts = inst.vertices
        cum = {back[0]: 0.0}
        for a, b in zip(back, back[1:]):
            cum[b] = cum[a] + math.dist(pts[a].to_float(), pts[b].to_float())
        for p, q, travel in tr.segment_travel:
            if p not in cum or q not in cum:
                errors += 1
                continue
            worst_segment = max(worst_segment, travel / abs(cum[p] - cum[q]))
    ok = (pairs >= 500 and errors == 0 and worst_delivered <= 2 * (1 + REL)
          and worst_travel <= 18 * (1 + REL) and worst_segment <= 9 * (1 + REL))
    report_criterion("negative routing bounds", ok,
                     f"{pairs} pairs, {errors} errors, max delivered {worst_delivered:.4f}, "
                     f"max travel {worst_travel:.4f}, max restart segment {worst_segment:.4f}")
    assert ok


def worst_case_ratio(alpha, doublings=None):
    kwargs = {} if doublings is None else {"doublings": doublings}
    d = gen_negative_worst_case(WorstCaseParams(alpha=Fraction(alpha)), **kwargs)
    tr = route_negative(d.instance, build(d.instance, "half_plus"), d.s, d.t)
    return d, tr, tr.total / tr.st_length


def test_negative_worst_case_reproduction(report_criterion):
    _, _, peak = worst_case_ratio("2425/10000")
    _, _, flat = worst_case_ratio("0")
    target_flat = 7 * math.sqrt(3)
    d, tr, literal = worst_case_ratio("2425/10000", LITERAL_DOUBLINGS)
    name = {v: k for k, v in d.params["labels"].items()}
    walk = tr.vertices
    turns = [name[walk[i]] for i in range(1, len(walk) - 1) if walk[i - 1] == walk[i + 1]]
    order_ok = turns + [name[walk[-1]]] == ["r1", "l1", "r2", "l3", "r5", "l4", "t"]
    ok = 12.36 <= peak <= 12.49 and abs(flat / target_flat - 1) <= 0.01 and order_ok
    report_criterion("negative routing worst case", ok,
                     f"ratio {peak:.4f} at alpha 0.2425 (2*sqrt(39) = {2 * math.sqrt(39):.4f}), "
                     f"{flat:.4f} at alpha 0 (7*sqrt(3) = {target_flat:.4f}); five-budget schedule "
                     f"gives {literal:.4f} with turn order {','.join(turns)}")
    assert ok


def test_grid_construction_properties(report_criterion):
    grid = gen_lower_bound_grid(GridParams(16, Fraction(1, 1000), 0))
    inst, n = grid.instance, grid.params["n"]
    valid = validate(inst) == []
    missing = []
    for u in grid.params["rows"][0]:
        winners = {closest_in_subcone(inst, sub.ref) for k in range(6) for sub in subcones_at(inst, u, k, "theta6")}
        if grid.s not in winners:
            missing.append(u)
    length, _ = shortest_path(build(inst, "theta6").weighted(), grid.s, grid.t)
    ok = valid and not missing and length <= 4 * n * n
    report_criterion("lower-bound grid properties", ok,
                     f"{inst.n} vertices, {len(inst.constraints)} constraints, valid={valid}, "
                     f"{len(missing)} bottom-row vertices without s, s-t distance {length:.2f} <= {4 * n * n}")
    assert ok


def test_half_graphs_plane_and_two_spanners(random_suite, report_criterion):
    crossings = checked = 0
    worst = 1.0
    for inst, graphs in random_suite.items:
        for family in ("half_plus", "half_minus"):
            crossings += crossing_edge_pairs(inst.vertices, graphs[family].edges)
            if inst.n <= 60:
                checked += 1
                worst = max(worst, spanner_check(inst, family, graphs[family]))
    ok = crossings == 0 and worst <= 2 + REL
    report_criterion("half-graphs plane and 2-spanners", ok,
                     f"{crossings} crossing pairs over {2 * len(random_suite.items)} graphs, "
                     f"max spanning ratio {worst:.4f} over {checked} graphs with n <= 60")
    assert ok


def test_chain_and_triangle_path_oracles(report_criterion):
    rng = random.Random(11)
    chains = bad_chains = nontrivial = 0
    while chains < 200:
        inst = gen_random(rng.randrange(10, 31), rng.choice(["0", "0.2", "0.4"]), rng.randrange(10 ** 6))
        for _ in range(20):
            u, v, w = rng.sample(range(inst.n), 3)
            if convex_chain_applicable(inst, u, v, w):
                chain = convex_chain(inst, u, v, w)
                chains += 1
                nontrivial += len(chain) > 2
                bad_chains += not chain_is_valid(inst, chain, u, v, w)
                break
    paths = bad_paths = 0
    while paths < 200:
        inst = gen_random(rng.randrange(10, 61), rng.choice(["0", "0.2"]), rng.randrange(10 ** 6))
        g = build(inst, "half_plus")
        for _ in range(10):
            u, w = rng.sample(range(inst.n), 2)
            if not (inst.sees(u, w) and is_positive_sector(sector_of(inst.vertices[w] - inst.vertices[u]), "half_plus")):
                continue
            paths += 1
            try:
                path = path_in_triangle_exists(g, u, w)
                bad_paths += not (path[0] == u and path[-1] == w
                                  and all(sees(inst, a, b) for a, b in zip(path, path[1:])))
            except Exception:
                bad_paths += 1
    ok = bad_chains == 0 and bad_paths == 0
    report_criterion("convex chain and triangle path oracles", ok,
                     f"{chains} chains ({nontrivial} with interior vertices), {bad_chains} invalid; "
                     f"{paths} triangle paths, {bad_paths} missing")
    assert ok


def test_locality_and_memory_contracts(random_suite, report_criterion):
    view_fields = {f.name for f in dataclasses.fields(LocalView)}
    step_params = list(inspect.signature(positive_step).parameters)
    memory_params = list(inspect.signature(negative_step).parameters)
    sizes = set()
    for inst, g, s, t in random_suite.pairs("negative", 3, seed=3):
        for mem in route_negative(inst, g, s, t).memory_log:
            sizes.add(tuple(type(getattr(mem, f)).__name__ for f in MEMORY_FIELDS))
    ok = (view_fields == {"current", "current_point", "neighbors", "incident_constraints", "source",
                          "destination", "rejected"}
          and step_params == ["view", "family"]
          and memory_params == ["view", "mem", "family", "arrived_from"]
          and tuple(f.name for f in dataclasses.fields(SearchMemory)) == ("anchor", "side", "budget", "spent", "phase")
          and sizes <= {("int", "int", "float", "float", "str")})
    report_criterion("locality and constant memory", ok,
                     f"view fields {sorted(view_fields)}, memory fields {list(MEMORY_FIELDS)}, "
                     f"memory shapes seen {sorted(sizes)}")
    assert ok
