"""Exact sequential reference computations.

Everything here is deliberately plain: a heap Dijkstra, big-integer path
counts, rational dependencies. The distributed code is checked against these.
"""

from __future__ import annotations

import heapq
import itertools
import math
from fractions import Fraction

from .graph import Graph, GraphError

INF = math.inf


class NotATree(GraphError):
    pass


class DoesNotSpanS(GraphError):
    pass


class TooLarge(GraphError):
    pass


def sssp(g: Graph, src: int) -> dict[int, float]:
    dist = {v: INF for v in g.nodes}
    dist[src] = 0
    heap = [(0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in g.adj[u].items():
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def exact_parent_sets(g: Graph, root: int, k: float = INF) -> dict[int, set[int]]:
    """Parents of every node within distance ``k`` of ``root`` in its DLG."""
    dist = sssp(g, root)
    out = {}
    for v in g.nodes:
        if dist[v] > k:
            continue
        out[v] = {p for p, w in g.adj[v].items() if dist[p] + w == dist[v]}
    return out


def shortest_path_counts(g: Graph, src: int) -> dict[int, int]:
    """sigma[v] = number of shortest src-v paths, with sigma[src] = 1."""
    dist = sssp(g, src)
    sigma = {v: 0 for v in g.nodes}
    sigma[src] = 1
    for v in sorted((v for v in g.nodes if dist[v] < INF), key=lambda v: dist[v]):
        if v == src:
            continue
        sigma[v] = sum(sigma[p] for p, w in g.adj[v].items() if dist[p] + w == dist[v])
    return sigma


def dependencies(g: Graph, src: int) -> dict[int, Fraction]:
    """delta_{src*}(v) for every v by the bottom-up recursion over the DLG of src."""
    dist = sssp(g, src)
    sigma = shortest_path_counts(g, src)
    delta = {v: Fraction(0) for v in g.nodes}
    for w in sorted((v for v in g.nodes if dist[v] < INF), key=lambda v: -dist[v]):
        for p, wt in g.adj[w].items():
            if dist[p] + wt == dist[w]:
                delta[p] += Fraction(sigma[p], sigma[w]) * (1 + delta[w])
    return delta


def exact_betweenness(g: Graph) -> dict[int, Fraction]:
    bc = {v: Fraction(0) for v in g.nodes}
    for s in g.nodes:
        for v, d in dependencies(g, s).items():
            if v != s:
                bc[v] += d
    return {v: x / 2 for v, x in bc.items()}


def naive_betweenness(g: Graph) -> dict[int, Fraction]:
    """BC by enumerating every shortest path explicitly. Exponential, n <= 8 only."""
    if g.n > 8:
        raise TooLarge("naive enumeration limited to n <= 8")
    dist = {s: sssp(g, s) for s in g.nodes}

    def paths(s, t):
        if s == t:
            return [[s]]
        out = []
        for p, w in g.adj[t].items():
            if dist[s][p] + w == dist[s][t]:
                out += [q + [t] for q in paths(s, p)]
        return out

    bc = {v: Fraction(0) for v in g.nodes}
    for s, t in itertools.combinations(g.nodes, 2):
        ps = paths(s, t)
        for p in ps:
            for v in p[1:-1]:
                bc[v] += Fraction(1, len(ps))
    return bc


def exact_closeness(g: Graph) -> dict[int, Fraction]:
    out = {}
    for v in g.nodes:
        total = sum(sssp(g, v).values())
        out[v] = Fraction(g.n - 1, total) if total else Fraction(0)
    return out


def _tree_adj(tree_edges, weights: Graph | None = None) -> dict[int, dict[int, int]]:
    adj: dict[int, dict[int, int]] = {}
    for e in tree_edges:
        if len(e) == 3:
            u, v, w = e
        else:
            u, v = e
            w = weights.weight(u, v)
        adj.setdefault(u, {})[v] = w
        adj.setdefault(v, {})[u] = w
    return adj


def routing_cost(g: Graph, tree_edges, S) -> int:
    """Sum of tree distances over ordered pairs of S (each unordered pair counts twice)."""
    S = sorted(set(S))
    if len(S) <= 1 and not tree_edges:
        return 0
    edges = []
    for e in tree_edges:
        u, v = e[0], e[1]
        if v not in g.adj.get(u, {}):
            raise NotATree(f"({u},{v}) is not an edge of the graph")
        edges.append((u, v, g.weight(u, v)))
    adj = _tree_adj(edges)
    nodes = set(adj)
    if len(edges) != len(nodes) - 1:
        raise NotATree("edge count does not match a tree")
    start = next(iter(nodes))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    if seen != nodes:
        raise NotATree("tree is not connected")
    if not set(S) <= nodes:
        raise DoesNotSpanS("tree misses nodes of S")
    total = 0
    for s in S:
        dist = {s: 0}
        stack = [s]
        while stack:
            u = stack.pop()
            for v, w in adj[u].items():
                if v not in dist:
                    dist[v] = dist[u] + w
                    stack.append(v)
        total += sum(dist[t] for t in S)
    return total


def spt_edges(parents: dict[int, int]) -> list[tuple[int, int]]:
    """Edge list of a tree given as child -> parent pointers."""
    return sorted((min(c, p), max(c, p)) for c, p in parents.items())


def _spanning_trees(nodes: list[int], edges: list[tuple[int, int, int]]):
    """All spanning trees of the graph (nodes, edges) via include/exclude with union-find."""
    need = len(nodes) - 1
    index = {v: i for i, v in enumerate(nodes)}

    def rec(i, chosen, parent):
        if len(chosen) == need:
            yield list(chosen)
            return
        if len(edges) - i < need - len(chosen):
            return
        u, v, w = edges[i]
        ru, rv = _find(parent, index[u]), _find(parent, index[v])
        if ru != rv:
            p2 = list(parent)
            p2[ru] = rv
            chosen.append(edges[i])
            yield from rec(i + 1, chosen, p2)
            chosen.pop()
        yield from rec(i + 1, chosen, parent)

    yield from rec(0, [], list(range(len(nodes))))


def _find(parent, x):
    while parent[x] != x:
        x = parent[x]
    return x


def brute_force_smrct(g: Graph, S) -> tuple[list[tuple[int, int]], int]:
    """Globally optimal subtree spanning S by exhaustive enumeration (n <= 10)."""
    if g.n > 10:
        raise TooLarge("exhaustive S-MRCT limited to n <= 10")
    S = sorted(set(S))
    if len(S) == 1:
        return [], 0
    others = [v for v in g.nodes if v not in S]
    best = None
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            nodes = sorted(S + list(extra))
            keep = set(nodes)
            sub = [(u, v, w) for u, v, w in g.edges if u in keep and v in keep]
            if len(sub) < len(nodes) - 1:
                continue
            for tree in _spanning_trees(nodes, sub):
                cost = routing_cost(g, tree, S)
                if best is None or cost < best[1]:
                    best = ([(u, v) for u, v, _ in tree], cost)
    if best is None:
        raise DoesNotSpanS("S is not connected in g")
    return best


def ball(g: Graph, r: int, k: float) -> list[int]:
    """N_k(r): nodes within weighted distance k of r, r included."""
    return [v for v, d in sssp(g, r).items() if d <= k]


def neighborhood_max(g: Graph, r: int, k: float, values: dict[int, int]) -> int:
    return max(values[v] for v in ball(g, r, k))


def neighborhood_sum(g: Graph, r: int, k: float, values: dict[int, int]) -> int:
    return sum(values[v] for v in ball(g, r, k))
