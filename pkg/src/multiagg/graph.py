"""Undirected graphs with positive integer weights, generators, file I/O and metrics.

Nodes are the dense IDs ``1..n``. Node 1 acts as the coordinator in the
applications built on top of the framework.
"""

from __future__ import annotations

import hashlib
import heapq
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path


class GraphError(ValueError):
    pass


class ParseError(GraphError):
    def __init__(self, msg: str, line: int):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class AsymmetricWeight(ParseError):
    pass


class NonPositiveWeight(ParseError):
    pass


class DisconnectedGraph(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        seen = set()
        canon = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), int(w)
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if u > v:
                u, v = v, u
            if not (1 <= u and v <= self.n):
                raise GraphError(f"edge ({u},{v}) outside 1..{self.n}")
            if w < 1:
                raise GraphError(f"edge ({u},{v}) has non-positive weight {w}")
            if (u, v) in seen:
                raise GraphError(f"parallel edge ({u},{v})")
            seen.add((u, v))
            canon.append((u, v, w))
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        return cls(n, tuple(edges))

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adj(self) -> dict[int, dict[int, int]]:
        """Neighbor -> weight map per node, neighbors in increasing ID order."""
        tmp: dict[int, dict[int, int]] = {u: {} for u in self.nodes}
        for u, v, w in self.edges:
            tmp[u][v] = w
            tmp[v][u] = w
        return {u: dict(sorted(nb.items())) for u, nb in tmp.items()}

    def weight(self, u: int, v: int) -> int:
        return self.adj[u][v]

    @property
    def w_max(self) -> int:
        return max((w for _, _, w in self.edges), default=1)

    @cached_property
    def connected(self) -> bool:
        if self.n <= 1:
            return True
        ncomp, _ = connected_components(self.to_sparse(), directed=False)
        return ncomp == 1

    def to_sparse(self, unit: bool = False) -> csr_matrix:
        if not self.edges:
            return csr_matrix((self.n, self.n), dtype=float)
        e = np.array(self.edges, dtype=np.int64)
        rows = np.concatenate([e[:, 0], e[:, 1]]) - 1
        cols = np.concatenate([e[:, 1], e[:, 0]]) - 1
        data = np.ones(len(rows)) if unit else np.concatenate([e[:, 2], e[:, 2]]).astype(float)
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def relabel(self, perm: dict[int, int]) -> "Graph":
        return Graph(self.n, tuple((perm[u], perm[v], w) for u, v, w in self.edges))

    def to_text(self) -> str:
        lines = [f"n {self.n}"]
        lines += [f"{u} {v} {w}" for u, v, w in self.edges]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]


# -- generators ---------------------------------------------------------------

def _prufer_tree(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Uniform random labeled tree on 1..n."""
    if n == 1:
        return []
    if n == 2:
        return [(1, 2)]
    seq = [int(x) for x in rng.integers(1, n + 1, size=n - 2)]
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    leaves = [i for i in range(1, n + 1) if degree[i] == 1]
    heapq.heapify(leaves)
    out = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        out.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    out.append((u, v))
    return out


def gen_random_connected(n: int, edge_prob: float, max_weight: int = 1, seed: int = 0) -> Graph:
    """Random spanning tree plus independent extra edges with probability ``edge_prob``."""
    if n < 1:
        raise GraphError("n must be at least 1")
    if not 0 < edge_prob <= 1:
        raise GraphError("edge_prob must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    pairs = {tuple(sorted(e)) for e in _prufer_tree(n, rng)}
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            if (u, v) not in pairs and rng.random() < edge_prob:
                pairs.add((u, v))
    pairs = sorted(pairs)
    weights = rng.integers(1, max_weight + 1, size=len(pairs))
    return Graph(n, tuple((u, v, int(w)) for (u, v), w in zip(pairs, weights)))


def gen_lowerbound_chain(s: int, d: int) -> Graph:
    """Roots ``1..s`` all attached to a chain head, followed by ``d-1`` more chain nodes."""
    if s < 1 or d < 1:
        raise GraphError("s and d must be at least 1")
    head = s + 1
    edges = [(r, head, 1) for r in range(1, s + 1)]
    edges += [(head + i, head + i + 1, 1) for i in range(d - 1)]
    return Graph(s + d, tuple(edges))


def gen_diamond_chain(n: int) -> Graph:
    """Source 1, sink n, and (n-2)/2 layers of two nodes each, consecutive layers fully joined.

    Every layer doubles the number of shortest paths, so node n is reached by
    2**((n-2)/2) of them.
    """
    if n < 4 or n % 2:
        raise GraphError("diamond chain needs an even n >= 4")
    layers = [[1]] + [[2 + 2 * i, 3 + 2 * i] for i in range((n - 2) // 2)] + [[n]]
    edges = [(a, b, 1) for prev, nxt in zip(layers, layers[1:]) for a in prev for b in nxt]
    return Graph(n, tuple(edges))


def gen_barbell(m: int) -> Graph:
    """Two m-cliques joined through a hub node ``2m+1`` adjacent to nodes 1 and m+1.

    The hub lies on every path between the cliques, so its BC is ``m*m``.
    """
    if m < 2:
        raise GraphError("clique size must be at least 2")
    a = range(1, m + 1)
    b = range(m + 1, 2 * m + 1)
    hub = 2 * m + 1
    edges = [(u, v, 1) for u in a for v in a if u < v]
    edges += [(u, v, 1) for u in b for v in b if u < v]
    edges += [(1, hub, 1), (m + 1, hub, 1)]
    return Graph(2 * m + 1, tuple(edges))


def gen_path(n: int, weight: int = 1) -> Graph:
    return Graph(n, tuple((i, i + 1, weight) for i in range(1, n)))


def gen_star(leaves: int, center: int = 1) -> Graph:
    others = [v for v in range(1, leaves + 2) if v != center]
    return Graph(leaves + 1, tuple((center, v, 1) for v in others))


def gen_cycle(n: int) -> Graph:
    return Graph(n, tuple([(i, i + 1, 1) for i in range(1, n)] + [(1, n, 1)]))


def gen_complete(n: int) -> Graph:
    return Graph(n, tuple((u, v, 1) for u in range(1, n + 1) for v in range(u + 1, n + 1)))


# -- file I/O ----------------------------------------------------------------

def parse_graph(text: str) -> Graph:
    n = None
    edges: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise ParseError("expected header 'n <count>'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(f"bad node count {parts[1]!r}", lineno) from None
            if n < 1:
                raise ParseError("node count must be positive", lineno)
            continue
        if len(parts) != 3:
            raise ParseError("expected 'u v w'", lineno)
        try:
            u, v, w = (int(p) for p in parts)
        except ValueError:
            raise ParseError(f"non-integer field in {line!r}", lineno) from None
        if u == v:
            raise ParseError(f"self-loop at node {u}", lineno)
        if w < 1:
            raise NonPositiveWeight(f"weight {w} on edge ({u},{v})", lineno)
        if not (1 <= min(u, v) and max(u, v) <= n):
            raise ParseError(f"node out of range 1..{n}", lineno)
        key = (min(u, v), max(u, v))
        if key in edges:
            if edges[key] != w:
                raise AsymmetricWeight(f"edge {key} listed with weights {edges[key]} and {w}", lineno)
            raise ParseError(f"duplicate edge {key}", lineno)
        edges[key] = w
    if n is None:
        raise ParseError("missing header", 1)
    return Graph(n, tuple((u, v, w) for (u, v), w in edges.items()))


def load_graph(path) -> Graph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def save_graph(g: Graph, path) -> None:
    Path(path).write_text(g.to_text(), encoding="utf-8")


# -- metrics ------------------------------------------------------------------

@dataclass
class GraphMetrics:
    ecc_h: np.ndarray            # indexed by node-1
    ecc_w: np.ndarray
    D_h: int
    D_w: int
    D_sp: int                    # min hops among minimum-weight paths, maximized over pairs
    D_sp_max: int = field(default=0)  # max hops among minimum-weight paths (parent-DAG depth)


def distance_matrices(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Weighted and hop all-pairs distances as integer arrays (0-based)."""
    dw = shortest_path(g.to_sparse(), method="D", directed=False)
    dh = shortest_path(g.to_sparse(unit=True), method="D", directed=False, unweighted=True)
    if np.isinf(dw).any():
        raise DisconnectedGraph("graph is not connected")
    return dw.astype(np.int64), dh.astype(np.int64)


def compute_metrics(g: Graph) -> GraphMetrics:
    if not g.connected:
        raise DisconnectedGraph("graph is not connected")
    dw, dh = distance_matrices(g)
    ecc_w = dw.max(axis=1)
    ecc_h = dh.max(axis=1)
    sp_min = sp_max = 0
    adj = g.adj
    for s in range(g.n):
        order = np.argsort(dw[s], kind="stable")
        lo = {s + 1: 0}
        hi = {s + 1: 0}
        for idx in order[1:]:
            v = int(idx) + 1
            dv = dw[s, idx]
            pars = [p for p, w in adj[v].items() if dw[s, p - 1] + w == dv]
            lo[v] = min(lo[p] for p in pars) + 1
            hi[v] = max(hi[p] for p in pars) + 1
        sp_min = max(sp_min, max(lo.values()))
        sp_max = max(sp_max, max(hi.values()))
    return GraphMetrics(
        ecc_h=ecc_h, ecc_w=ecc_w,
        D_h=int(ecc_h.max()), D_w=int(ecc_w.max()),
        D_sp=sp_min, D_sp_max=sp_max,
    )


def ceil_log2(x: int) -> int:
    """Bits needed to tell ``x`` values apart, at least 1."""
    return max(1, (int(x) - 1).bit_length())
