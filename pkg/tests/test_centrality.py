import math
from fractions import Fraction

import pytest
from hypothesis import given

from multiagg.centrality import InvalidEpsilon, bc_dependencies, bc_setup, cc_approx
from multiagg.congest import SimConfig
from multiagg.graph import (DisconnectedGraph, Graph, compute_metrics, gen_barbell, gen_diamond_chain,
                            gen_path, gen_random_connected, gen_star)
from multiagg.oracle import dependencies, exact_betweenness, exact_closeness, shortest_path_counts

from conftest import graph_and_roots, weighted_graphs


def test_exact_mode_examples():
    assert bc_setup(gen_path(3), mode="exact", force_all=True).estimates == {1: 0, 2: 1, 3: 0}
    assert bc_setup(gen_star(5), mode="exact", force_all=True).estimates[1] == 10


@given(weighted_graphs(n_min=3, n_max=16))
def test_exact_mode_equals_betweenness(g):
    assert bc_setup(g, mode="exact", force_all=True).estimates == exact_betweenness(g)


@given(graph_and_roots(n_max=16))
def test_exact_dependencies_per_root(case):
    g, S = case
    states, _ = bc_dependencies(g, S, "exact")
    for r in S:
        dep = dependencies(g, r)
        sig = shortest_path_counts(g, r)
        for u in g.nodes:
            assert states[u].data.total_sp[r] == sig[u]
            assert states[u].data.delta_bc[r] == dep[u]


def test_down_hook_examples():
    states, _ = bc_dependencies(gen_diamond_chain(4), [1], "bounded")
    assert [states[u].data.total_sp[1].value for u in (1, 2, 4)] == [1, 1, 2]
    states, _ = bc_dependencies(gen_path(3), [1], "bounded")
    assert states[2].data.delta_bc[1] == 1


@given(graph_and_roots(n_min=4, n_max=24, max_weight=10))
def test_bounded_counts_one_sided(case):
    g, S = case
    n = g.n
    states, _ = bc_dependencies(g, S, "bounded")
    for r in S:
        sig = shortest_path_counts(g, r)
        depth = n
        lo = (1 - Fraction(1, n ** 4)) ** depth
        for u in g.nodes:
            got = states[u].data.total_sp[r].value
            assert sig[u] * lo <= got <= sig[u]


@given(graph_and_roots(n_min=4, n_max=24, max_weight=10))
def test_bounded_dependencies_close(case):
    g, S = case
    states, _ = bc_dependencies(g, S, "bounded")
    tol = Fraction(1, g.n)
    for r in S:
        for u, d in dependencies(g, r).items():
            got = states[u].data.delta_bc[r]
            assert (1 - tol) * d <= got <= (1 + tol) * d


def test_large_diamond_counts():
    n = 40
    states, _ = bc_dependencies(gen_diamond_chain(n), [1], "bounded")
    got = states[n].data.total_sp[1].value
    exact = 2 ** ((n - 2) // 2)
    assert exact * (1 - Fraction(1, n)) <= got <= exact


def test_sampling_is_monotone_and_estimates_set_once():
    g = gen_barbell(8)
    res = bc_setup(g, eps_prime=0.2, seed=3)
    sampled = [u for u, s in res.nodes.items() if s.is_sampled]
    assert len(sampled) == res.samples_total
    assert all(s.s_bc >= 0 for s in res.nodes.values())
    assert res.estimates[g.n] is not None


def test_bc_report_shape():
    res = bc_setup(gen_barbell(6), eps_prime=0.2, seed=1)
    rep = res.report()
    assert {"nodes", "rounds_used", "samples_total"} <= set(rep)
    assert set(rep["nodes"][0]) == {"id", "bc_estimate", "s_bc", "k_samples"}


def test_bc_hub_estimate_reasonable():
    g = gen_barbell(12)
    true = exact_betweenness(g)[g.n]
    hits = sum(true / 11 <= (bc_setup(g, eps_prime=0.1, seed=s).estimates[g.n] or 0) <= 11 * true
               for s in range(10))
    assert hits >= 8


def test_bc_errors():
    with pytest.raises(InvalidEpsilon):
        bc_setup(gen_path(10), eps_prime=0.6)
    with pytest.raises(DisconnectedGraph):
        bc_setup(Graph(3, ((1, 2, 1),)), eps_prime=0.4)


def test_bc_deterministic():
    g = gen_barbell(6)
    a = bc_setup(g, eps_prime=0.2, seed=2)
    b = bc_setup(g, eps_prime=0.2, seed=2, cfg=SimConfig(shuffle_seed=1))
    assert a.estimates == b.estimates and a.trace.digest() == b.trace.digest()


def test_cc_force_all_exact():
    assert cc_approx(gen_path(3), 0.3, force_all=True).estimates[2] == 1
    g = gen_random_connected(25, 0.15, 9, seed=4)
    assert cc_approx(g, 0.3, force_all=True).estimates == exact_closeness(g)


def test_cc_single_sample_of_self_is_infinite():
    res = cc_approx(gen_path(2), 0.9, seed=0)
    if len(res.sample) == 1:
        assert res.estimates[res.sample[0]] == math.inf


def test_cc_error_bound():
    g = gen_random_connected(60, 0.08, 10, seed=1)
    D = compute_metrics(g).D_w
    true = exact_closeness(g)
    res = cc_approx(g, 0.3, seed=1)
    ok = sum(abs(1 / true[u] - 1 / res.estimates[u]) <= 0.3 * D for u in g.nodes)
    assert ok >= 0.9 * g.n
    assert res.report()["rounds_used"] == res.rounds_used > 0


def test_cc_invalid_eps():
    with pytest.raises(InvalidEpsilon):
        cc_approx(gen_path(4), 1.5)
