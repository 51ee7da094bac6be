"""Parallel construction of |S| leveled graphs (or trees) and aggregation through them.

Links of the simulated network have unit latency. An edge of weight ``w`` is
emulated by a chain of ``w - 1`` relay processes hosted by the lower-ID
endpoint, so that every process-level link is a unit link and the wave
arrival round at an uncongested node equals its weighted distance. Only the
last link of a chain crosses the physical edge; all other chain links are
local to the host. Relays run the same wave protocol as real nodes but never
call aggregation hooks.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable

from .congest import AGG_WAVE, DLG_WAVE, Message, RoundTrace, SimConfig, SimError, run
from .graph import Graph
from .oracle import sssp

INF = math.inf
_EMPTY: dict = {}


class ScheduleViolation(SimError):
    pass


class MissingSchedule(SimError):
    pass


# -- overlay --------------------------------------------------------------------

class Overlay:
    """Unit-latency process graph. Real nodes keep their IDs; relays get IDs above n."""

    def __init__(self, g: Graph):
        n = g.n
        self.n = n
        self.host: dict[int, int] = {u: u for u in g.nodes}
        links: dict[int, list[int]] = {u: [] for u in g.nodes}
        self.real_of_port: dict[tuple[int, int], int] = {}
        self.edge_end: dict[tuple[int, int], tuple[int, int]] = {}
        nxt = n + 1
        for u, v, w in g.edges:
            if w == 1:
                links[u].append(v)
                links[v].append(u)
                self.real_of_port[(u, v)] = v
                self.real_of_port[(v, u)] = u
                self.edge_end[(u, v)] = (u, v)
                self.edge_end[(v, u)] = (v, u)
                continue
            chain = list(range(nxt, nxt + w - 1))
            nxt += w - 1
            for r in chain:
                self.host[r] = u
                links[r] = []
            seq = [u] + chain + [v]
            for a, b in zip(seq, seq[1:]):
                links[a].append(b)
                links[b].append(a)
            self.real_of_port[(u, chain[0])] = v
            self.real_of_port[(v, chain[-1])] = u
            # physical message from v arrives at the last relay; from u's last relay at v
            self.edge_end[(u, v)] = (chain[-1], v)
            self.edge_end[(v, u)] = (v, chain[-1])
        self.ports: dict[int, list[int]] = {}
        for p, ls in links.items():
            if p <= n:
                ls = sorted(ls, key=lambda q: self.real_of_port[(p, q)])
            self.ports[p] = ls
        self.rank = {p: {q: i for i, q in enumerate(ls)} for p, ls in self.ports.items()}
        self.hosted: dict[int, list[int]] = {u: [] for u in g.nodes}
        for p in sorted(self.host):
            self.hosted[self.host[p]].append(p)
        self.size = nxt - 1


@lru_cache(maxsize=64)
def overlay_of(g: Graph) -> Overlay:
    return Overlay(g)


class Host:
    """Engine-level node program that runs the processes hosted at one real node."""

    def __init__(self, u: int, ov: Overlay, procs: dict, kind: str, bits, horizon: int | None):
        self.u = u
        self.ov = ov
        self.procs = procs
        self.kind = kind
        self.bits = bits
        self.horizon = horizon
        self.buffer: list = []
        self.active = {p for p, pr in procs.items() if pr.busy()}
        self.last_real = -1

    def step(self, t: int, inbox: dict[int, Message]) -> list[tuple[int, Message]]:
        deliveries: dict[int, dict[int, tuple]] = {}
        for dst, src, trip in self.buffer:
            deliveries.setdefault(dst, {})[src] = trip
        for x, m in inbox.items():
            dst, src = self.ov.edge_end[(self.u, x)]
            deliveries.setdefault(dst, {})[src] = (m.root, m.dist, m.payload)
        if self.u in deliveries:
            self.last_real = t
        self.buffer = []
        out = []
        host = self.ov.host
        for pid in sorted(self.active | deliveries.keys()):
            proc = self.procs.get(pid)
            if proc is None:
                continue
            for port, r, d, pl in proc.step(t, deliveries.get(pid, _EMPTY)):
                h = host[port]
                if h == self.u:
                    self.buffer.append((port, pid, (r, d, pl)))
                else:
                    out.append((h, Message(self.kind, r, d, pl, self.bits(pl))))
            if proc.busy():
                self.active.add(pid)
            else:
                self.active.discard(pid)
        return out

    def done(self, t: int) -> bool:
        if self.horizon is not None and t >= self.horizon:
            return True
        return not self.active and not self.buffer


# -- per-node state and aggregation hooks ----------------------------------------

@dataclass
class RelayRecord:
    tau: dict[int, list[int]] = field(default_factory=dict)
    ports: dict[int, list[int]] = field(default_factory=dict)


@dataclass
class DlgState:
    """What node ``u`` knows after the construction phase."""

    node: int
    in_S: bool
    S_size: int
    k: float
    tree: bool
    omega: dict[int, int] = field(default_factory=dict)
    tau: dict[int, list[int]] = field(default_factory=dict)
    parents: dict[int, list[int]] = field(default_factory=dict)
    msg_c: dict[int, Any] = field(default_factory=dict)
    msg_p: dict[int, Any] = field(default_factory=dict)
    data: Any = None
    down_calls: dict[int, int] = field(default_factory=dict)
    up_calls: dict[int, int] = field(default_factory=dict)
    first_send: dict[int, int] = field(default_factory=dict)
    parent_ports: dict[int, list[int]] = field(default_factory=dict)
    relays: dict[int, RelayRecord] = field(default_factory=dict)

    @property
    def roots(self) -> set[int]:
        return set(self.omega)

    def sp(self, r: int) -> int:
        return len(self.tau.get(r, ()))

    def as_json(self) -> list[dict]:
        return [
            {"node": self.node, "root": r, "omega": self.omega[r],
             "parents": self.parents.get(r, []), "tau": self.tau.get(r, [])}
            for r in sorted(self.omega)
        ]


class Aggregator:
    """Hook set for the framework. Node-local data lives in ``st.data``."""

    name = "none"

    def init_node(self, st: DlgState) -> None:
        pass

    def root_payload(self, st: DlgState) -> Any:
        return None

    def down(self, st: DlgState, root: int, payload: Any, parent: int, weight: int) -> None:
        st.msg_c[root] = None

    def leaf_payload(self, st: DlgState, root: int) -> Any:
        return None

    def up(self, st: DlgState, root: int, payload: Any, child: int, weight: int) -> None:
        pass

    def payload_bits(self, payload: Any, kind: str) -> int:
        return 0


NO_AGG = Aggregator()


# -- construction phase -------------------------------------------------------------

class _Wave:
    __slots__ = ("pid", "ports", "rank", "st", "agg", "k", "tree", "horizon", "check",
                 "known", "pend", "delay", "sent", "fwd", "ov", "g", "rec", "trace")

    def __init__(self, pid, ov, g, st, agg, k, tree, horizon, check, trace):
        self.pid = pid
        self.ov = ov
        self.g = g
        self.ports = ov.ports[pid]
        self.rank = ov.rank[pid]
        self.st = st                # None for relays
        self.agg = agg
        self.k = k
        self.tree = tree
        self.horizon = horizon
        self.check = check
        self.trace = trace
        self.known: dict[int, int] = st.omega if st is not None else {}
        self.pend = {p: set() for p in self.ports}
        self.delay: set[int] = set()
        self.sent: dict[int, int] = {}
        self.fwd: dict[int, Any] = {}
        self.rec = None if st is not None else RelayRecord()

    def start_root(self, payload):
        self.known[self.pid] = 0
        self.st.tau[self.pid] = []
        self.st.parents[self.pid] = []
        self.st.parent_ports[self.pid] = []
        self.st.msg_c[self.pid] = payload
        for p in self.ports:
            self.pend[p].add(self.pid)

    def busy(self) -> bool:
        return any(self.pend.values())

    def _violation(self, what: str):
        if self.check:
            raise ScheduleViolation(f"process {self.pid}: {what}")
        self.trace.count("schedule_repair")

    def _record(self, t, port, r, d, pl):
        if self.st is None:
            self.rec.tau.setdefault(r, []).append(t)
            self.rec.ports.setdefault(r, []).append(port)
            return
        st = self.st
        if r in st.first_send and st.first_send[r] < t:
            self._violation(f"parent for root {r} arrived at {t} after forwarding at {st.first_send[r]}")
        real = self.ov.real_of_port[(self.pid, port)]
        st.tau.setdefault(r, []).append(t)
        st.parents.setdefault(r, []).append(real)
        st.parent_ports.setdefault(r, []).append(port)
        st.down_calls[r] = st.down_calls.get(r, 0) + 1
        self.agg.down(st, r, pl, real, self.g.adj[self.pid][real])

    def _reset(self, r, d):
        self._violation(f"root {r} reached with shorter distance {d} after {self.known[r]}")
        self.trace.count("distance_reset")
        del self.known[r]
        if self.st is not None:
            for dct in (self.st.tau, self.st.parents, self.st.parent_ports):
                dct.pop(r, None)
        else:
            self.rec.tau.pop(r, None)
            self.rec.ports.pop(r, None)

    def _accept(self, t, port, r, d, pl, min_r, s):
        known = self.known
        if r in known and d < known[r]:
            self._reset(r, d)
        if r not in known:
            if d <= self.k:
                self._record(t, port, r, d, pl)
            known[r] = d
            if self.st is None:
                self.fwd[r] = pl
            for p in self.ports:
                if p != port:
                    self.pend[p].add(r)
            if min_r < r or s < r:
                self.delay.add(r)
        elif d == known[r]:
            if d <= self.k and not self.tree:
                self._record(t, port, r, d, pl)
            self.pend[port].discard(r)

    def step(self, t: int, recv: dict) -> list:
        known = self.known
        sent = self.sent
        if recv:
            R = [m[0] for p, m in recv.items()
                 if m[0] not in known and (p not in sent or m[0] < sent[p])]
            min_r = min(R) if R else INF
        else:
            min_r = INF
        s = INF
        if self.delay:
            s = min(self.delay)
            if s <= min_r:
                self.delay.discard(s)
        for p, l in sent.items():
            m = recv.get(p)
            if m is None or m[0] >= l:
                self.pend[p].discard(l)
        if recv:
            rank = self.rank
            for p in sorted(recv, key=lambda q: (recv[q][1], rank[q])):
                r, d, pl = recv[p]
                l = sent.get(p)
                if l is not None and r > l:
                    continue        # the neighbor keeps r pending and retries
                self._accept(t, p, r, d, pl, min_r, s)
        self.sent = {}
        out = []
        if self.horizon is not None and t >= self.horizon:
            return out
        delay = self.delay
        for p in self.ports:
            pend = self.pend[p]
            if not pend:
                continue
            cands = pend - delay if delay else pend
            if not cands:
                continue
            r = min(cands)
            if self.st is not None:
                pl = self.st.msg_c.get(r)
                self.st.first_send.setdefault(r, t)
            else:
                pl = self.fwd.get(r)
            out.append((p, r, known[r] + 1, pl))
            self.sent[p] = r
        return out


def whole_graph_depth(g: Graph) -> int:
    """Depth 2*ecc(1), at least the weighted diameter, used when a run should cover the whole graph."""
    return 2 * int(max(sssp(g, 1).values()))


def _resolve_k(g: Graph, k) -> float:
    if k is None:
        return whole_graph_depth(g)
    if k == INF:
        return INF
    if k < 0:
        raise ValueError("k must be non-negative")
    return int(k)


def _comp(g, S, k, agg, cfg, tree, horizon, node_data, phase):
    cfg = cfg or SimConfig()
    agg = agg or NO_AGG
    S = sorted(set(S))
    if not S:
        raise ValueError("S must be nonempty")
    if any(r not in g.nodes for r in S):
        raise ValueError("S contains unknown nodes")
    K = _resolve_k(g, k)
    if horizon == "auto":
        horizon = None if K == INF else len(S) + K
    ov = overlay_of(g)
    Sset = set(S)
    trace_events = RoundTrace(n=g.n, budget=cfg.budget(g.n))
    states: dict[int, DlgState] = {}
    hosts = {}
    for u in g.nodes:
        st = DlgState(node=u, in_S=u in Sset, S_size=len(S), k=K, tree=tree)
        if node_data is not None:
            st.data = node_data[u]
        agg.init_node(st)
        states[u] = st
        procs = {}
        for pid in ov.hosted[u]:
            procs[pid] = _Wave(pid, ov, g, st if pid == u else None, agg, K, tree,
                               horizon, cfg.check_schedule, trace_events)
        if u in Sset:
            procs[u].start_root(agg.root_payload(st))
        hosts[u] = Host(u, ov, procs, DLG_WAVE, lambda pl: agg.payload_bits(pl, DLG_WAVE), horizon)
    _, trace = run(g, hosts, cfg, phase=phase)
    for ev, c in trace_events.events.items():
        trace.count(ev, c)
    for u, h in hosts.items():
        for pid, proc in h.procs.items():
            if pid != u:
                states[u].relays[pid] = proc.rec
    trace.completion[phase] = max(
        (max(x) for st in states.values() for x in st.tau.values() if x), default=0)
    return states, trace


def dlg_comp(g: Graph, S: Iterable[int], k=None, agg: Aggregator | None = None,
             cfg: SimConfig | None = None, *, horizon="auto", node_data=None):
    """Build the leveled graph of every root in S, restricted to depth k.

    ``k=None`` means the whole graph (depth 2*ecc(1)); ``k=math.inf`` records
    everything and runs until quiescence. ``horizon`` is the last round in
    which messages may be sent; the default is |S| + k.
    """
    return _comp(g, S, k, agg, cfg, False, horizon, node_data, "dlg_comp")


def tree_comp(g: Graph, S: Iterable[int], k=None, agg: Aggregator | None = None,
              cfg: SimConfig | None = None, *, horizon="auto", node_data=None):
    """Single-parent variant: the first accepted r-message fixes the parent."""
    return _comp(g, S, k, agg, cfg, True, horizon, node_data, "tree_comp")


# -- aggregation phase ------------------------------------------------------------

class _Agr:
    __slots__ = ("pid", "ov", "g", "st", "agg", "schedule", "msg", "done_roots", "check", "trace")

    def __init__(self, pid, ov, g, st, agg, schedule, check, trace):
        self.pid = pid
        self.ov = ov
        self.g = g
        self.st = st
        self.agg = agg
        self.schedule = schedule
        self.msg: dict[int, Any] = {}
        self.done_roots: set[int] = set()
        self.check = check
        self.trace = trace

    def busy(self) -> bool:
        return bool(self.schedule)

    def step(self, t: int, recv: dict) -> list:
        if recv:
            rank = self.ov.rank[self.pid]
            for p in sorted(recv, key=rank.__getitem__):
                r, _, pl = recv[p]
                if r in self.done_roots:
                    if self.check:
                        raise ScheduleViolation(
                            f"process {self.pid}: child payload for root {r} after own send")
                    self.trace.count("late_child")
                if self.st is None:
                    self.msg[r] = pl
                    continue
                st = self.st
                real = self.ov.real_of_port[(self.pid, p)]
                st.up_calls[r] = st.up_calls.get(r, 0) + 1
                self.agg.up(st, r, pl, real, self.g.adj[self.pid][real])
        out = []
        for p, r in self.schedule.pop(t, ()):
            self.done_roots.add(r)
            if self.st is None:
                if r not in self.msg:
                    continue        # relay without a child below it
                pl = self.msg[r]
            else:
                pl = self.st.msg_p.get(r)
            out.append((p, r, None, pl))
        return out


def _agr(g, S, agg, states, cfg, phase, T=None):
    cfg = cfg or SimConfig()
    S = sorted(set(S))
    if not states or any(u not in states for u in g.nodes):
        raise MissingSchedule("aggregation needs the states of a finished construction phase")
    st1 = states[g.nodes[0]]
    if st1.S_size != len(S):
        raise MissingSchedule("construction phase ran with a different root set")
    K = st1.k
    if T is None:
        if K == INF:
            # relays can hold later arrivals than any real node, so include them
            T = max((max(x) for st in states.values()
                     for rec in (st, *st.relays.values()) for x in rec.tau.values() if x), default=0)
        else:
            T = len(S) + K
    ov = overlay_of(g)
    trace_events = RoundTrace(n=g.n, budget=cfg.budget(g.n))
    hosts = {}
    late = 0
    for u in g.nodes:
        st = states[u]
        procs = {}
        for pid in ov.hosted[u]:
            if pid == u:
                taus, ports = st.tau, st.parent_ports
                for r in st.tau:
                    st.msg_p[r] = agg.leaf_payload(st, r)
            else:
                rec = st.relays.get(pid)
                taus, ports = (rec.tau, rec.ports) if rec else ({}, {})
            sched: dict[int, list] = {}
            for r, tl in taus.items():
                for tau_h, port in zip(tl, ports[r]):
                    when = T - tau_h
                    if when < 0:
                        late += 1
                        continue
                    sched.setdefault(when, []).append((port, r))
            procs[pid] = _Agr(pid, ov, g, st if pid == u else None, agg, sched,
                              cfg.check_schedule, trace_events)
        hosts[u] = Host(u, ov, procs, AGG_WAVE, lambda pl: agg.payload_bits(pl, AGG_WAVE), None)
    if late:
        if cfg.check_schedule:
            raise ScheduleViolation(f"{late} parent records lie beyond the aggregation horizon {T}")
        trace_events.count("beyond_horizon", late)
    _, trace = run(g, hosts, cfg, phase=phase)
    for ev, c in trace_events.events.items():
        trace.count(ev, c)
    trace.completion[phase] = max((h.last_real for h in hosts.values()), default=-1)
    return states, trace


def dlg_agr(g: Graph, S, k, agg: Aggregator, states: dict[int, DlgState], cfg: SimConfig | None = None):
    """Reversed-schedule convergecast: send to parent h at round |S| + k - tau[r][h]."""
    _check_k(g, k, states)
    return _agr(g, S, agg, states, cfg, "dlg_agr")


def tree_agr(g: Graph, S, k, agg: Aggregator, states: dict[int, DlgState], cfg: SimConfig | None = None):
    _check_k(g, k, states)
    return _agr(g, S, agg, states, cfg, "tree_agr")


def _check_k(g, k, states):
    if not states:
        raise MissingSchedule("aggregation needs the states of a finished construction phase")
    K = _resolve_k(g, k)
    if states[1].k != K:
        raise MissingSchedule(f"construction ran with depth {states[1].k}, aggregation asked for {K}")


def dump_states(states: dict[int, DlgState]) -> str:
    rows = [row for u in sorted(states) for row in states[u].as_json()]
    return json.dumps(rows, indent=1)
