# Many shortest-path waves at once on a simulated synchronous network.
#
# Every root floods its own wave. When two waves meet on an edge the one with
# the larger root ID waits a round, so no root is held up by more than the
# number of smaller roots. Run: python demos/01_leveled_graphs.py

# %%
import math

from multiagg import dlg_comp, gen_lowerbound_chain, gen_random_connected, tree_comp
from multiagg.oracle import exact_parent_sets, sssp

# %% A bottleneck: s roots all hang off the head of a chain of length d.
s, d = 6, 5
g = gen_lowerbound_chain(s, d)
S = list(range(1, s + 1))
states, trace = dlg_comp(g, S, math.inf)
end = g.n
print(f"chain with {s} roots, tail node {end}")
for r in S:
    first = min(states[end].tau[r])
    print(f"  root {r}: distance {states[end].omega[r]}, arrives round {first}, late by {first - states[end].omega[r]}")
print("completion round", trace.completion["dlg_comp"], "<= |S| + k =", s + d)

# %% Weighted edges take as many rounds as their weight.
g = gen_random_connected(12, 0.25, 5, seed=1)
states, trace = dlg_comp(g, [3, 8], None)
dist = sssp(g, 3)
par = exact_parent_sets(g, 3)
print("\nnode  dist  recorded  oracle parents")
for u in g.nodes:
    print(f"{u:4d}  {dist[u]:4d}  {states[u].omega[3]:8d}  {sorted(states[u].parents[3])} / {sorted(par[u])}")

# %% The tree variant keeps only the first parent to arrive.
states, _ = tree_comp(g, [3, 8], None)
print("\ntree parents toward root 3:", {u: states[u].parents[3] for u in g.nodes if u != 3})
