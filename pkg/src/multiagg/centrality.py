"""Betweenness centrality by adaptive root sampling, sampled closeness, diameter estimates.

Every application is a sequence of engine runs ("phases") over persistent
per-node state. Coordination phases use T_1 with fixed waiting windows, and
the reported round count is the sum of the windows every node waits.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .approx import ApproxCount, ApproxRatio, mantissa_bits, ratio_exponent_bits
from .congest import RoundTrace, SimConfig, dist_bits, id_bits, node_rng
from .control import ControlTree, broadcast, build_t1, convergecast, hop_eccentricity
from .framework import Aggregator, DlgState, dlg_agr, dlg_comp
from .graph import DisconnectedGraph, Graph, ceil_log2

log = logging.getLogger(__name__)


class InvalidEpsilon(ValueError):
    pass


# -- coordination helpers -------------------------------------------------------------

@dataclass
class Session:
    """Run bookkeeping shared by the applications: trace, T_1 and round windows."""

    g: Graph
    cfg: SimConfig
    trace: RoundTrace
    tree: ControlTree | None = None
    D_h: int = 0
    D_w: int = 0
    rounds: int = 0
    windows: list = field(default_factory=list)

    def add(self, name: str, sub: RoundTrace, window: int | None = None) -> None:
        """Account a phase. ``window`` is the nominal length every node waits."""
        used = sub.rounds if window is None else window
        if window is not None and sub.rounds - 1 > window:
            self.trace.count("window_overrun")
        self.trace.absorb(sub, phase=name)
        self.rounds += used
        self.windows.append((name, used, sub.rounds))

    def count_bits(self) -> int:
        return ceil_log2(self.g.n + 1)


def _session(g: Graph, cfg: SimConfig | None) -> Session:
    if not g.connected:
        raise DisconnectedGraph("graph is not connected")
    cfg = cfg or SimConfig()
    return Session(g, cfg, RoundTrace(n=g.n, budget=cfg.budget(g.n)))


def _estimate(ses: Session, hops: bool) -> None:
    g, cfg = ses.g, ses.cfg
    if hops:
        ecc_h, tr = hop_eccentricity(g, cfg)
        ses.add("hop_echo", tr)
        ses.D_h = 2 * ecc_h
    tree, tr = build_t1(g, cfg)
    ses.add("t1_echo", tr)
    ses.tree = tree
    ses.D_w = 2 * tree.ecc
    _, tr = broadcast(g, tree, (ses.D_h, ses.D_w), 2 * dist_bits(g.n, g.w_max), cfg, "diam_bcast")
    ses.add("diam_bcast", tr)


def _bcast(ses: Session, name: str, value, bits: int):
    got, tr = broadcast(ses.g, ses.tree, value, bits, ses.cfg, name)
    ses.add(name, tr, max(ses.D_w, 1))
    return got


def _sum_up(ses: Session, name: str, values: dict[int, int]) -> int:
    total, tr = convergecast(ses.g, ses.tree, values, lambda a, b: a + b,
                             ses.count_bits(), ses.cfg, name)
    ses.add(name, tr, 2 * max(ses.D_w, 1))
    return total


def estimate_diameters(g: Graph, cfg: SimConfig | None = None) -> tuple[int, int, int]:
    """(D_h', D_w', rounds): twice node 1's hop and weighted eccentricity via T_1."""
    ses = _session(g, cfg)
    _estimate(ses, hops=True)
    return ses.D_h, ses.D_w, ses.rounds


# -- betweenness ------------------------------------------------------------------------

@dataclass
class BcNodeState:
    s_bc: Fraction = Fraction(0)
    k_samples: int = 0
    is_sampled: bool = False
    gets_sampled: bool = False
    bc_estimate: Fraction | None = None
    total_sp: dict = field(default_factory=dict)
    delta_bc: dict = field(default_factory=dict)


class BcAgg(Aggregator):
    """Path counts flow down the leveled graphs, dependencies flow back up.

    In bounded mode the down payload is an ApproxCount and the up payload is
    the single ratio (1 + delta) / sigma, so the parent adds sigma_p * ratio.
    In exact mode the payloads are exact integers and (delta, sigma) pairs.
    """

    name = "bc"

    def __init__(self, n: int, mode: str = "bounded", c: int = 1):
        if mode not in ("exact", "bounded"):
            raise ValueError("mode must be 'exact' or 'bounded'")
        self.n = n
        self.mode = mode
        self.M = mantissa_bits(n, c)
        self.E_bits = id_bits(n)
        self.R_bits = ratio_exponent_bits(n, self.M)

    def _count(self, x: int):
        return x if self.mode == "exact" else ApproxCount.encode(x, self.M, self.E_bits)

    @staticmethod
    def _val(x) -> int:
        return x if isinstance(x, int) else x.value

    def init_node(self, st: DlgState) -> None:
        st.data.total_sp = {}
        st.data.delta_bc = {}
        if st.in_S:
            st.data.total_sp[st.node] = self._count(1)

    def root_payload(self, st):
        return st.data.total_sp[st.node]

    def down(self, st, root, payload, parent, weight):
        cur = st.data.total_sp.get(root)
        total = self._val(payload) + (self._val(cur) if cur is not None else 0)
        st.data.total_sp[root] = self._count(total)
        st.msg_c[root] = st.data.total_sp[root]

    def _up_msg(self, st, root):
        sigma = self._val(st.data.total_sp[root])
        delta = st.data.delta_bc[root]
        if self.mode == "exact":
            return (delta, sigma)
        return ApproxRatio.encode((1 + delta) / sigma, self.M, self.R_bits)

    def leaf_payload(self, st, root):
        st.data.delta_bc[root] = Fraction(0)
        if root == st.node:
            return None
        return self._up_msg(st, root)

    def up(self, st, root, payload, child, weight):
        sigma = self._val(st.data.total_sp[root])
        if self.mode == "exact":
            d_c, s_c = payload
            assert s_c > 0
            delta = Fraction(sigma, s_c) * (1 + d_c)
        else:
            delta = sigma * payload.value
        st.data.delta_bc[root] += delta
        if root != st.node:
            st.data.s_bc += delta
            st.msg_p[root] = self._up_msg(st, root)

    def payload_bits(self, payload, kind):
        if payload is None:
            return 0
        if isinstance(payload, (ApproxCount, ApproxRatio)):
            return payload.width
        if isinstance(payload, int):
            return max(1, payload.bit_length())
        d, s = payload
        return d.numerator.bit_length() + d.denominator.bit_length() + s.bit_length()


def bc_dependencies(g: Graph, S, mode: str = "bounded", c: int = 1, k=None,
                    cfg: SimConfig | None = None):
    """One construction plus aggregation round with the BC hooks for roots S.

    Returns ``(states, trace)``; ``states[u].data`` holds ``total_sp`` and
    ``delta_bc`` per root and ``s_bc`` summed over the roots other than u.
    """
    agg = BcAgg(g.n, mode, c)
    data = {u: BcNodeState() for u in g.nodes}
    states, t1 = dlg_comp(g, S, k, agg, cfg, node_data=data)
    states, t2 = dlg_agr(g, S, k, agg, states, cfg)
    t1.absorb(t2)
    return states, t1


@dataclass
class BcResult:
    estimates: dict[int, Fraction | None]
    nodes: dict[int, BcNodeState]
    rounds_used: int
    samples_total: int
    trace: RoundTrace
    D_h: int
    D_w: int
    iterations: list = field(default_factory=list)

    def report(self) -> dict:
        return {
            "nodes": [
                {"id": u,
                 "bc_estimate": None if s.bc_estimate is None else float(s.bc_estimate),
                 "s_bc": float(s.s_bc), "k_samples": s.k_samples}
                for u, s in sorted(self.nodes.items())
            ],
            "rounds_used": self.rounds_used,
            "samples_total": self.samples_total,
        }


def bc_setup(g: Graph, tau_c: float = 5, n_hat: int = 1, c: int = 1, eps_prime: float = 0.1,
             seed: int = 0, cfg: SimConfig | None = None, mode: str = "bounded",
             force_all: bool = False) -> BcResult:
    """Adaptive sampling BC approximation coordinated by node 1.

    ``force_all`` samples every node in a single iteration and reports an
    estimate for every node regardless of the threshold; with exact counts
    this reproduces BC exactly.
    """
    n = g.n
    if not force_all and not (1 / n ** c < eps_prime < 0.5):
        raise InvalidEpsilon(f"need 1/n^c < eps' < 1/2, got {eps_prime}")
    ses = _session(g, cfg)
    _estimate(ses, hops=True)
    data = {u: BcNodeState() for u in g.nodes}
    rng = {u: node_rng(seed, u) for u in g.nodes}
    agg = BcAgg(n, mode, c)
    k_total = 0
    n_bc = 0
    iters = []
    if force_all:
        schedule = [None]
    else:
        lo = ceil_log2(max(ses.D_h, 1)) if ses.D_h > 1 else 0
        schedule = list(range(lo, max(lo, ceil_log2(n)) + 1))
    for T in schedule:
        if T is None:
            p_s = 1.0
        else:
            p_s = min(1.0, 2 ** T / n)
        # nodes know n, so the exponent T alone fixes p_s
        _bcast(ses, "sample_exp", -1 if T is None else T, ceil_log2(ceil_log2(n) + 2) + 1)
        for u in g.nodes:
            d = data[u]
            if not d.is_sampled:
                d.gets_sampled = force_all or rng[u].random() < p_s
        size = _sum_up(ses, "sample_count", {u: int(data[u].gets_sampled) for u in g.nodes})
        _bcast(ses, "sample_size", size, ses.count_bits())
        S_i = [u for u in g.nodes if data[u].gets_sampled]
        if S_i:
            states, tr = dlg_comp(g, S_i, ses.D_w, agg, ses.cfg, node_data=data)
            ses.add("dlg_comp", tr, len(S_i) + ses.D_w + 1)
            states, tr = dlg_agr(g, S_i, ses.D_w, agg, states, ses.cfg)
            ses.add("dlg_agr", tr, len(S_i) + ses.D_w + 1)
        k_total += size
        reports = {}
        for u in g.nodes:
            d = data[u]
            d.k_samples = k_total
            if d.gets_sampled:
                d.is_sampled = True
                d.gets_sampled = False
            hit = force_all or d.s_bc >= n * tau_c
            reports[u] = 0
            if hit and d.bc_estimate is None and k_total > 0:
                d.bc_estimate = Fraction(n) * d.s_bc / (2 * k_total)
                reports[u] = 1
        n_bc += _sum_up(ses, "threshold_count", reports)
        iters.append({"T": T, "p_s": p_s, "samples": size, "n_bc": n_bc})
        if n_bc >= n_hat:
            _bcast(ses, "terminate", 1, 1)
            break
    return BcResult(
        estimates={u: data[u].bc_estimate for u in g.nodes},
        nodes=data, rounds_used=ses.rounds, samples_total=k_total,
        trace=ses.trace, D_h=ses.D_h, D_w=ses.D_w, iterations=iters,
    )


# -- closeness --------------------------------------------------------------------------

@dataclass
class CcResult:
    estimates: dict[int, Fraction | float]
    sample: list[int]
    rounds_used: int
    trace: RoundTrace
    D_w: int
    retries: int = 0

    def report(self) -> dict:
        return {
            "nodes": [{"id": u, "cc_estimate": float(x)} for u, x in sorted(self.estimates.items())],
            "rounds_used": self.rounds_used,
            "samples": len(self.sample),
        }


def cc_approx(g: Graph, eps: float, seed: int = 0, cfg: SimConfig | None = None,
              force_all: bool = False) -> CcResult:
    """Closeness from distances to a random sample of roots (inverse additive error eps*D_w)."""
    if not 0 < eps < 1:
        raise InvalidEpsilon("eps must lie in (0, 1)")
    n = g.n
    ses = _session(g, cfg)
    _estimate(ses, hops=False)
    rng = {u: node_rng(seed, u) for u in g.nodes}
    p = 1.0 if force_all else min(1.0, math.log(n) / (n * eps * eps)) if n > 1 else 1.0
    retries = 0
    while True:
        joined = {u: int(force_all or rng[u].random() < p) for u in g.nodes}
        size = _sum_up(ses, "sample_count", joined)
        _bcast(ses, "sample_size", size, ses.count_bits())
        if size:
            break
        retries += 1
        log.info("empty closeness sample, doubling probability %.4f", p)
        p = min(1.0, 2 * p)
    S = [u for u in g.nodes if joined[u]]
    states, tr = dlg_comp(g, S, ses.D_w, None, ses.cfg)
    ses.add("dlg_comp", tr, len(S) + ses.D_w + 1)
    est = {}
    for u in g.nodes:
        total = sum(Fraction(n * states[u].omega[r], size * (n - 1)) for r in S) if n > 1 else 0
        est[u] = 1 / total if total else math.inf
    return CcResult(est, S, ses.rounds, ses.trace, ses.D_w, retries)
