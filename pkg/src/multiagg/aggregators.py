"""Reference hooks: neighborhood maximum over leveled graphs, neighborhood sum over trees."""

from __future__ import annotations

from .congest import SimConfig
from .framework import Aggregator, DlgState, dlg_agr, dlg_comp, tree_agr, tree_comp
from .graph import Graph, ceil_log2


class PayloadOverflow(ValueError):
    pass


class MaxAgg(Aggregator):
    name = "max"

    def __init__(self, values: dict[int, int], width: int):
        self.values = values
        self.width = width

    def leaf_payload(self, st: DlgState, root: int) -> int:
        return self.values[st.node]

    def up(self, st, root, payload, child, weight):
        if payload > st.msg_p[root]:
            st.msg_p[root] = payload

    def payload_bits(self, payload, kind):
        return self.width


class SumAgg(MaxAgg):
    name = "sum"

    def up(self, st, root, payload, child, weight):
        st.msg_p[root] += payload


def _width(values: dict[int, int], n: int, beta: int) -> int:
    """Signed width for values of magnitude below n**beta."""
    bound = n ** beta
    big = max((abs(v) for v in values.values()), default=0)
    if big >= bound:
        raise PayloadOverflow(f"value {big} does not fit below n^{beta} = {bound}")
    return ceil_log2(bound) + 1


def max_aggregate(g: Graph, S, k, values: dict[int, int], cfg: SimConfig | None = None,
                  beta: int = 2, tree: bool = False):
    """Per root r, the maximum value in its k-neighborhood. Returns (result, trace)."""
    agg = MaxAgg(values, _width(values, g.n, beta))
    comp, agr = (tree_comp, tree_agr) if tree else (dlg_comp, dlg_agr)
    states, t1 = comp(g, S, k, agg, cfg)
    states, t2 = agr(g, S, k, agg, states, cfg)
    t1.absorb(t2)
    return {r: states[r].msg_p[r] for r in set(S)}, t1


def sum_aggregate(g: Graph, S, k, values: dict[int, int], cfg: SimConfig | None = None,
                  beta: int = 2, tree: bool = True):
    """Per root r, the sum of values in its k-neighborhood (tree variant counts each node once).

    ``tree=False`` runs the same hooks over the full leveled graphs, which
    counts a node once per shortest path; it exists to demonstrate why the
    tree variant is needed.
    """
    _width(values, g.n, beta)
    big = max((abs(v) for v in values.values()), default=0)
    width = ceil_log2(g.n * big + 1) + 1
    agg = SumAgg(values, width)
    comp, agr = (tree_comp, tree_agr) if tree else (dlg_comp, dlg_agr)
    states, t1 = comp(g, S, k, agg, cfg)
    states, t2 = agr(g, S, k, agg, states, cfg)
    t1.absorb(t2)
    return {r: states[r].msg_p[r] for r in set(S)}, t1
