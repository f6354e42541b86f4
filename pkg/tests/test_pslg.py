import itertools
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from exact_oracles import chain_is_valid, sees
from thetaroute.errors import PreconditionViolated
from thetaroute.instances import gen_random
from thetaroute.pslg import (
    Instance,
    convex_chain,
    convex_chain_applicable,
    make_instance,
    validate,
    visibility_graph,
    visible,
)

BLOCKED = make_instance([(0, 0), (4, "1/7"), (2, -1), (2, 1)], [(2, 3)])


def rules(inst):
    return [v.rule for v in validate(inst)]


def test_validate_flags_horizontal_pair():
    assert rules(make_instance([(0, 0), (4, 0), (2, 3)])) == ["ray_parallel"]


def test_validate_accepts_general_position():
    assert validate(make_instance([(0, 0), (4, "1/7"), (2, 3)], [(0, 1)])) == []


def test_validate_flags_crossing_constraints():
    inst = make_instance([(0, 0), (4, "1/7"), (2, -1), (2, 1)], [(0, 1), (2, 3)])
    assert rules(inst) == ["proper_crossing"]
    assert validate(inst)[0].ids == (0, 1, 2, 3)


def test_validate_flags_duplicates_collinear_and_bad_endpoints():
    assert "duplicate_vertex" in rules(make_instance([(0, 0), (0, 0), (1, 3)]))
    assert "collinear" in rules(make_instance([(0, 0), (1, 3), (2, 6)]))
    assert "constraint_endpoint" in rules(make_instance([(0, 0), (1, 3)], [(0, 5)]))


def test_visible_examples():
    assert not visible(BLOCKED, 0, 1)
    assert visible(BLOCKED, 0, 2)
    assert visible(BLOCKED, 2, 3)


def test_visibility_graph_examples():
    two = make_instance([(0, 0), (1, 3)])
    assert visibility_graph(two).edges() == {(0, 1)}
    edges = visibility_graph(BLOCKED).edges()
    assert len(edges) == 5 and (0, 1) not in edges


@pytest.mark.parametrize("n,frac,seed", [(50, "0.2", 1), (80, "0.3", 2), (30, "0", 3)])
def test_visibility_matrix_matches_pairwise_oracle(n, frac, seed):
    inst = gen_random(n, frac, seed)
    mat = inst.visibility_matrix
    assert np.array_equal(mat, mat.T)
    for u, v in itertools.combinations(range(n), 2):
        assert mat[u, v] == visible(inst, u, v) == sees(inst, u, v)
    for a, b in inst.constraints:
        assert visible(inst, a, b)


@given(st.integers(0, 10 ** 6))
def test_visible_symmetric(seed):
    inst = gen_random(15, "0.3", seed)
    rng = random.Random(seed)
    u, v = rng.sample(range(inst.n), 2)
    assert visible(inst, u, v) == visible(inst, v, u)


def test_json_round_trip_is_bit_exact():
    inst = make_instance([("1/3", "-2/7"), ("0.125", 5), (7, "22/7")], [(2, 0)], name="tiny")
    text = inst.to_json()
    back = Instance.from_json(text)
    assert back.vertices == inst.vertices and back.constraints == ((0, 2),) and back.name == "tiny"
    assert back.to_json() == text


@given(st.integers(0, 10 ** 6))
def test_json_round_trip_random(seed):
    inst = gen_random(12, "0.2", seed)
    back = Instance.from_json(inst.to_json())
    assert back.vertices == inst.vertices and back.constraints == inst.constraints


# -- convex chains --------------------------------------------------------


def test_convex_chain_of_empty_triangle():
    inst = make_instance([(0, 0), (4, "1/3"), (2, 5)])
    assert convex_chain(inst, 0, 1, 2) == [0, 1]


def test_convex_chain_with_one_interior_vertex():
    inst = make_instance([(0, 0), (4, "1/3"), (2, 5), ("19/10", 2)])
    assert convex_chain(inst, 0, 1, 2) == [0, 3, 1]


def test_convex_chain_skips_vertices_hidden_behind_the_chain():
    # 3 lies inside the triangle but below the segment from 4 to the far corner
    inst = make_instance([(0, 0), (6, "1/5"), (3, 6), ("3/2", "1/3"), ("5/2", 2)])
    chain = convex_chain(inst, 0, 1, 2)
    assert chain == [0, 4, 1]


def test_convex_chain_rejects_bad_preconditions():
    blocked = make_instance([(0, 0), (4, "1/3"), (2, 5), (1, 3), (3, "3/2")], [(3, 4)])
    with pytest.raises(PreconditionViolated):
        convex_chain(blocked, 0, 1, 2)
    entering = make_instance([(0, 0), (4, "1/3"), (2, 5), ("21/10", 1)], [(2, 3)])
    assert not convex_chain_applicable(entering, 0, 1, 2)
    with pytest.raises(PreconditionViolated):
        convex_chain(entering, 0, 1, 2)


def random_chain_triples(count, seed):
    rng = random.Random(seed)
    found = 0
    while found < count:
        inst = gen_random(rng.randrange(10, 31), rng.choice(["0", "0.2", "0.4"]), rng.randrange(10 ** 6))
        for _ in range(20):
            u, v, w = rng.sample(range(inst.n), 3)
            if convex_chain_applicable(inst, u, v, w):
                found += 1
                yield inst, u, v, w
                break


def test_convex_chain_random_configurations():
    for inst, u, v, w in random_chain_triples(60, seed=7):
        assert chain_is_valid(inst, convex_chain(inst, u, v, w), u, v, w)
