# Closeness from a few sampled roots, and low routing-cost trees.

# %%
from multiagg import cc_approx, compute_metrics, gen_random_connected, mrct, mrct_rand
from multiagg.oracle import brute_force_smrct, exact_closeness

# %% Distances to about log(n)/eps^2 roots give the mean distance within eps*D.
g = gen_random_connected(100, 0.05, 10, seed=3)
D = compute_metrics(g).D_w
true = exact_closeness(g)
res = cc_approx(g, 0.3, seed=3)
errs = [float(abs(1 / true[u] - 1 / res.estimates[u]) / D) for u in g.nodes]
print(f"{len(res.sample)} sampled roots, worst inverse error {max(errs):.3f} D (allowed 0.3 D), "
      f"{res.rounds_used} rounds")

# %% The best shortest-path tree rooted in S is within twice the optimum.
g = gen_random_connected(8, 0.4, 5, seed=11)
S = [1, 3, 5, 8]
opt_edges, opt = brute_force_smrct(g, S)
res = mrct(g, S)
print(f"\nS = {S}: chosen root {res.root}, cost {res.rc}, optimum {opt}")
print("per-root costs:", res.per_root)
print("tree:", res.tree_edges, " optimum tree:", sorted(opt_edges))

# %% Sampling only O(log n) candidate roots keeps the run short when S is large.
g = gen_random_connected(60, 0.08, 5, seed=5)
S = list(range(1, 61))
full, fast = mrct(g, S), mrct_rand(g, S, 0.5, seed=1)
print(f"\nall {len(S)} roots: cost {full.rc} in {full.rounds_used} rounds")
print(f"{len(fast.roots)} sampled roots: cost {fast.rc} in {fast.rounds_used} rounds")
