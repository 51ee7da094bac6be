from fractions import Fraction

import pytest
from hypothesis import given

from multiagg.graph import Graph, gen_complete, gen_cycle, gen_diamond_chain, gen_path, gen_star
from multiagg.oracle import (DoesNotSpanS, NotATree, TooLarge, brute_force_smrct, dependencies,
                             exact_betweenness, exact_closeness, exact_parent_sets,
                             naive_betweenness, routing_cost, shortest_path_counts, sssp)

from conftest import weighted_graphs

INF = float("inf")


def test_sssp_examples():
    assert sssp(gen_path(3), 1) == {1: 0, 2: 1, 3: 2}
    tri = Graph(3, ((1, 2, 1), (2, 3, 1), (1, 3, 3)))
    assert sssp(tri, 1)[3] == 2
    g = Graph(3, ((2, 3, 1),))
    assert sssp(g, 1) == {1: 0, 2: INF, 3: INF}


def test_parent_sets():
    g = gen_star(5)
    assert all(exact_parent_sets(g, 1)[v] == {1} for v in range(2, 7))
    assert exact_parent_sets(gen_diamond_chain(4), 1)[4] == {2, 3}
    assert set(exact_parent_sets(gen_path(5), 1, k=2)) == {1, 2, 3}


@given(weighted_graphs())
def test_parent_sets_satisfy_distance_equation(g):
    for r in g.nodes:
        d = sssp(g, r)
        for v, ps in exact_parent_sets(g, r).items():
            assert all(d[p] + g.weight(p, v) == d[v] for p in ps)
            assert (v == r) == (not ps)


def test_path_counts_examples():
    assert set(shortest_path_counts(gen_path(6), 1).values()) == {1}
    assert shortest_path_counts(gen_diamond_chain(10), 1)[10] == 16
    c = shortest_path_counts(gen_complete(4), 1)
    assert c == {1: 1, 2: 1, 3: 1, 4: 1}


def test_betweenness_examples():
    assert exact_betweenness(gen_path(3)) == {1: 0, 2: 1, 3: 0}
    assert exact_betweenness(gen_star(5))[1] == 10
    assert set(exact_betweenness(gen_complete(4)).values()) == {0}
    assert dependencies(gen_path(3), 1)[2] == 1


@given(weighted_graphs(n_max=8))
def test_recursion_matches_path_enumeration(g):
    assert exact_betweenness(g) == naive_betweenness(g)


def test_naive_guard():
    with pytest.raises(TooLarge):
        naive_betweenness(gen_path(9))


def test_closeness_examples():
    cc = exact_closeness(gen_path(3))
    assert cc[2] == 1 and cc[1] == Fraction(2, 3)
    assert set(exact_closeness(gen_complete(5)).values()) == {1}


@given(weighted_graphs(n_min=2))
def test_closeness_is_inverse_mean_distance(g):
    for v, c in exact_closeness(g).items():
        assert 1 / c == Fraction(sum(sssp(g, v).values()), g.n - 1)


def test_routing_cost_examples():
    assert routing_cost(gen_path(3), [], [2]) == 0
    assert routing_cost(gen_path(3), [(1, 2), (2, 3)], [1, 3]) == 4
    assert routing_cost(gen_star(3), [(1, 2), (1, 3), (1, 4)], [2, 3, 4]) == 12


def test_routing_cost_errors():
    g = gen_cycle(4)
    with pytest.raises(NotATree):
        routing_cost(g, [(1, 2), (2, 3), (3, 4), (1, 4)], [1, 3])
    with pytest.raises(NotATree):
        routing_cost(g, [(1, 3)], [1, 3])
    with pytest.raises(DoesNotSpanS):
        routing_cost(g, [(1, 2)], [1, 3])


def test_brute_force_examples():
    g = Graph(3, ((1, 2, 4), (2, 3, 1)))
    edges, rc = brute_force_smrct(g, [1, 2])
    assert edges == [(1, 2)] and rc == 8
    edges, rc = brute_force_smrct(gen_cycle(4), [1, 2, 3, 4])
    # any spanning path of C4: pair distances 1,1,1,2,2,3
    assert rc == 2 * 10 and len(edges) == 3
    with pytest.raises(TooLarge):
        brute_force_smrct(gen_path(11), [1, 2])
