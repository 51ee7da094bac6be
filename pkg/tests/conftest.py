import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from multiagg.graph import gen_random_connected

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def weighted_graphs(draw, n_min=2, n_max=14, max_weight=6):
    n = draw(st.integers(n_min, n_max))
    p = draw(st.sampled_from([0.1, 0.25, 0.5]))
    w = draw(st.integers(1, max_weight))
    seed = draw(st.integers(0, 10_000))
    return gen_random_connected(n, p, w, seed=seed)


@st.composite
def graph_and_roots(draw, n_min=2, n_max=14, max_weight=6, s_max=5):
    g = draw(weighted_graphs(n_min, n_max, max_weight))
    S = draw(st.lists(st.integers(1, g.n), min_size=1, max_size=min(s_max, g.n), unique=True))
    return g, sorted(S)


@pytest.fixture
def rng():
    return random.Random(1234)
