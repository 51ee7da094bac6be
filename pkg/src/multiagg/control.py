"""Coordination through node 1: echo-based tree T_1, broadcast and convergecast.

T_1 is the shortest-path tree of node 1 over the relay overlay, so a message
needs ecc(1) rounds to reach the farthest node, as on a weighted network.
A separate echo over the physical links alone yields the hop eccentricity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .congest import CONTROL, RoundTrace, SimConfig, dist_bits, run
from .framework import Host, overlay_of
from .graph import Graph


@dataclass
class ControlTree:
    """Per-process parent and children ports of T_1 (hosted like the processes)."""

    parent: dict[int, int | None]
    children: dict[int, list[int]]
    ecc: int

    def real_parent(self, g: Graph) -> dict[int, int]:
        """Child -> parent pointers of T_1 restricted to real nodes."""
        ov = overlay_of(g)
        out = {}
        for u in g.nodes:
            p = self.parent.get(u)
            if p is None:
                continue
            out[u] = ov.real_of_port[(u, p)]
        return out


class _Echo:
    """Explore/echo wave. Explores carry the distance; echoes carry a subtree maximum."""

    def __init__(self, pid, ports, rank, real, start):
        self.ports = ports
        self.rank = rank
        self.real = real
        self.start = start
        self.parent = None
        self.children: list[int] = []
        self.dist = 0 if start else None
        self.waiting = set(ports)
        self.best = 0 if real else -1
        self.pending = [(p, ("x", 1)) for p in ports] if start else []
        self.echoed = False

    def busy(self):
        return bool(self.pending)

    def step(self, t, recv):
        for p in sorted(recv, key=self.rank.__getitem__):
            tag, val = recv[p][2]
            self.waiting.discard(p)
            if tag == "x":
                if self.dist is None:
                    self.dist = val
                    self.parent = p
                    if self.real:
                        self.best = val
                    self.pending = [(q, ("x", val + 1)) for q in self.ports if q != p]
            elif val >= 0:
                # echoes from branches holding only relays carry -1 and are pruned
                self.children.append(p)
                self.best = max(self.best, val)
        out = [(p, 1, None, pl) for p, pl in self.pending]
        self.pending = []
        if self.dist is not None and not self.waiting and not self.echoed:
            self.echoed = True
            if not self.start:
                out.append((self.parent, 1, None, ("e", self.best)))
        return out


def _echo(g: Graph, cfg: SimConfig, overlay: bool, phase: str):
    ov = overlay_of(g)
    bits = dist_bits(g.n, g.w_max) + 1
    hosts = {}
    for u in g.nodes:
        procs = {}
        pids = ov.hosted[u] if overlay else [u]
        for pid in pids:
            if overlay:
                ports, rank = ov.ports[pid], ov.rank[pid]
            else:
                ports = list(g.adj[u])
                rank = {q: i for i, q in enumerate(ports)}
            procs[pid] = _Echo(pid, ports, rank, pid == u, pid == 1)
        hosts[u] = Host(u, ov if overlay else _PhysicalView(g), procs, CONTROL, lambda pl: bits, None)
    _, trace = run(g, hosts, cfg, phase=phase)
    root = hosts[1].procs[1]
    parent = {}
    children = {}
    for h in hosts.values():
        for pid, pr in h.procs.items():
            parent[pid] = pr.parent
            children[pid] = sorted(pr.children)
    return ControlTree(parent, children, root.best), trace


class _PhysicalView:
    """Overlay stand-in where every process is a real node and every link physical."""

    def __init__(self, g: Graph):
        self.host = {u: u for u in g.nodes}
        self.edge_end = {(u, v): (u, v) for u in g.nodes for v in g.adj[u]}
        self.rank = {u: {v: i for i, v in enumerate(g.adj[u])} for u in g.nodes}


def build_t1(g: Graph, cfg: SimConfig | None = None) -> tuple[ControlTree, RoundTrace]:
    """Echo from node 1 over the weighted overlay. ``tree.ecc`` is ecc_w(1)."""
    return _echo(g, cfg or SimConfig(), True, "t1_echo")


def hop_eccentricity(g: Graph, cfg: SimConfig | None = None) -> tuple[int, RoundTrace]:
    """Echo from node 1 over physical links only; returns ecc_h(1)."""
    tree, trace = _echo(g, cfg or SimConfig(), False, "hop_echo")
    return tree.ecc, trace


class _Down:
    def __init__(self, pid, children, value, start):
        self.children = children
        self.value = value if start else None
        self.pending = list(children) if start else []

    def busy(self):
        return bool(self.pending)

    def step(self, t, recv):
        for _, (_, _, pl) in recv.items():
            self.value = pl
            self.pending = list(self.children)
        out = [(c, 1, None, self.value) for c in self.pending]
        self.pending = []
        return out


class _Up:
    def __init__(self, pid, parent, children, value, combine):
        self.parent = parent
        self.waiting = set(children)
        self.value = value
        self.combine = combine
        self.sent = False
        self.ready = not children

    def busy(self):
        return self.ready and not self.sent and self.parent is not None

    def step(self, t, recv):
        for p, (_, _, pl) in recv.items():
            self.waiting.discard(p)
            self.value = self.combine(self.value, pl)
        if not self.waiting:
            self.ready = True
        if self.ready and not self.sent and self.parent is not None:
            self.sent = True
            return [(self.parent, 1, None, self.value)]
        return []


def broadcast(g: Graph, tree: ControlTree, value: Any, bits: int, cfg: SimConfig | None = None,
              phase: str = "broadcast") -> tuple[dict[int, Any], RoundTrace]:
    """Send ``value`` from node 1 down T_1. Returns what every real node received."""
    ov = overlay_of(g)
    hosts = {}
    for u in g.nodes:
        procs = {pid: _Down(pid, tree.children[pid], value, pid == 1) for pid in ov.hosted[u]}
        hosts[u] = Host(u, ov, procs, CONTROL, lambda pl: bits, None)
    _, trace = run(g, hosts, cfg or SimConfig(), phase=phase)
    return {u: hosts[u].procs[u].value for u in g.nodes}, trace


def convergecast(g: Graph, tree: ControlTree, values: dict[int, Any],
                 combine: Callable[[Any, Any], Any], bits: int, cfg: SimConfig | None = None,
                 phase: str = "convergecast") -> tuple[Any, RoundTrace]:
    """Combine the real nodes' values up T_1; relays contribute ``None``."""
    ov = overlay_of(g)

    def comb(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return combine(a, b)

    hosts = {}
    for u in g.nodes:
        procs = {pid: _Up(pid, tree.parent[pid], tree.children[pid],
                          values[u] if pid == u else None, comb)
                 for pid in ov.hosted[u]}
        hosts[u] = Host(u, ov, procs, CONTROL, lambda pl: bits, None)
    _, trace = run(g, hosts, cfg or SimConfig(), phase=phase)
    return hosts[1].procs[1].value, trace
