"""Routing-cost trees: best shortest-path tree rooted in S, and the sampled-root variant."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .centrality import Session, _bcast, _estimate, _session, _sum_up
from .congest import RoundTrace, SimConfig, node_rng
from .control import convergecast
from .framework import Aggregator, tree_agr, tree_comp
from .graph import Graph, ceil_log2

log = logging.getLogger(__name__)


class EmptyS(ValueError):
    pass


class MrctAgg(Aggregator):
    """Up payload (rc, z): routing cost inside the subtree and its number of S nodes.

    ``rc`` sums each unordered S-pair once; the reported cost doubles it.
    """

    name = "mrct"

    def __init__(self, S: set[int], n: int, w_max: int):
        self.S = S
        self.size = len(S)
        # half the cost is at most C(|S|, 2) pairs times a path of n-1 heaviest edges
        self.rc_bits = ceil_log2(self.size * (self.size - 1) // 2 * (n - 1) * w_max + 1)
        self.z_bits = ceil_log2(self.size + 1)

    def leaf_payload(self, st, root):
        return (0, 1 if st.node in self.S else 0)

    def up(self, st, root, payload, child, weight):
        r_c, z_c = payload
        rc, z = st.msg_p[root]
        z += z_c
        assert z <= self.size
        st.msg_p[root] = (rc + r_c + weight * z_c * (self.size - z_c), z)

    def payload_bits(self, payload, kind):
        return self.rc_bits + self.z_bits if payload is not None else 0


@dataclass
class MrctResult:
    root: int
    tree_edges: list[tuple[int, int]]
    rc: int
    rounds_used: int
    trace: RoundTrace
    roots: list[int]
    per_root: dict[int, int]
    trees: dict[int, list[tuple[int, int]]]
    retries: int = 0

    def report(self) -> dict:
        return {"root": self.root, "tree_edges": [list(e) for e in self.tree_edges],
                "rc": self.rc, "rounds_used": self.rounds_used}


def _count_S(ses: Session, S: list[int]) -> int:
    """Every node learns |S| through a convergecast and a broadcast."""
    Sset = set(S)
    size = _sum_up(ses, "s_count", {u: int(u in Sset) for u in ses.g.nodes})
    _bcast(ses, "s_size", size, ceil_log2(ses.g.n + 1))
    return size


def _run(ses: Session, S: list[int], roots: list[int]) -> MrctResult:
    g = ses.g
    agg = MrctAgg(set(S), g.n, g.w_max)
    states, tr = tree_comp(g, roots, ses.D_w, None, ses.cfg)
    ses.add("tree_comp", tr, len(roots) + ses.D_w + 1)
    states, tr = tree_agr(g, roots, ses.D_w, agg, states, ses.cfg)
    ses.add("tree_agr", tr, len(roots) + ses.D_w + 1)
    per_root = {r: 2 * states[r].msg_p[r][0] for r in roots}
    assert all(states[r].msg_p[r][1] == len(S) for r in roots)
    cand = {u: (per_root[u], u) if u in per_root else None for u in g.nodes}
    bits = agg.rc_bits + 1 + ceil_log2(g.n)
    best, tr = convergecast(g, ses.tree, cand, min, bits, ses.cfg, "argmin")
    ses.add("argmin", tr, 2 * max(ses.D_w, 1))
    rc, root = best
    _bcast(ses, "winner", root, ceil_log2(g.n))
    # a node keeps its parent edge iff its subtree holds a member of S (z > 0)
    trees = {r: sorted((min(u, st.parents[r][0]), max(u, st.parents[r][0]))
                       for u, st in states.items()
                       if st.parents.get(r) and st.msg_p[r][1] > 0)
             for r in roots}
    return MrctResult(root, trees[root], rc, ses.rounds, ses.trace, sorted(roots), per_root, trees)


def mrct(g: Graph, S, cfg: SimConfig | None = None) -> MrctResult:
    """Among the shortest-path trees rooted in S, the one with least routing cost over S."""
    S = sorted(set(S))
    if not S:
        raise EmptyS("S must be nonempty")
    ses = _session(g, cfg)
    _estimate(ses, hops=False)
    _count_S(ses, S)
    return _run(ses, S, S)


def mrct_rand(g: Graph, S, eps: float = 0.5, seed: int = 0, cfg: SimConfig | None = None,
              beta: float = 3.0) -> MrctResult:
    """Same as :func:`mrct` but only about ``beta * ln n`` sampled members of S act as roots.

    Every node still counts membership in the full S, so the cost computed
    at a sampled root is its true routing cost over S.
    """
    S = sorted(set(S))
    if not S:
        raise EmptyS("S must be nonempty")
    n = g.n
    ses = _session(g, cfg)
    _estimate(ses, hops=False)
    # p depends only on n and |S|, both known after the count
    p = min(1.0, beta * math.log(max(n, 2)) / _count_S(ses, S))
    rng = {u: node_rng(seed, u) for u in g.nodes}
    retries = 0
    Sset = set(S)
    while True:
        picked = {u: int(u in Sset and rng[u].random() < p) for u in g.nodes}
        size = _sum_up(ses, "sample_count", picked)
        _bcast(ses, "sample_size", size, ceil_log2(n + 1))
        if size:
            break
        retries += 1
        log.info("no sampled root, doubling probability %.4f", p)
        p = min(1.0, 2 * p)
    roots = [u for u in g.nodes if picked[u]]
    res = _run(ses, S, roots)
    res.retries = retries
    return res
