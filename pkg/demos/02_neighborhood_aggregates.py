# Aggregating back up the leveled graphs: neighborhood max and sum.
#
# The up pass replays the construction schedule in reverse, so a node hears
# from all its children before it talks to its parents.

# %%
from multiagg import gen_diamond_chain, gen_random_connected, max_aggregate, sum_aggregate
from multiagg.oracle import neighborhood_max, neighborhood_sum

g = gen_random_connected(30, 0.1, 6, seed=2)
vals = {u: (u * 37) % 101 - 50 for u in g.nodes}
S, k = [4, 9, 21], 8

res, trace = max_aggregate(g, S, k, vals)
for r in S:
    print(f"max in N_{k}({r}) = {res[r]}  oracle {neighborhood_max(g, r, k, vals)}")
print("phases:", trace.completion, "bound", len(S) + k)

res, _ = sum_aggregate(g, S, k, vals)
for r in S:
    print(f"sum in N_{k}({r}) = {res[r]}  oracle {neighborhood_sum(g, r, k, vals)}")

# %% Why sums need trees: on a diamond chain a node is reached along many
# shortest paths, and summing over all parents counts it once per path.
d = gen_diamond_chain(8)
ones = {u: 1 for u in d.nodes}
over_dlg, _ = sum_aggregate(d, [1], None, ones, tree=False)
over_tree, _ = sum_aggregate(d, [1], None, ones, tree=True)
print(f"\ndiamond n=8 node count: leveled graph says {over_dlg[1]}, tree says {over_tree[1]}")
