# Betweenness by sampling roots, with path counts squeezed into O(log n) bits.

# %%
from fractions import Fraction

from multiagg import bc_dependencies, bc_setup, gen_barbell, gen_diamond_chain
from multiagg.oracle import exact_betweenness, shortest_path_counts

# %% Path counts grow exponentially: a diamond chain doubles them every layer.
# A mantissa of (3+c) log n bits and a log n bit exponent keep them within 1/n
# (powers of two happen to be exact; the random corpus in the tests is not).
for n in (10, 22, 40, 64):
    g = gen_diamond_chain(n)
    states, trace = bc_dependencies(g, [1], "bounded")
    got = states[n].data.total_sp[1]
    exact = shortest_path_counts(g, 1)[n]
    print(f"n={n:3d}  exact {exact:>12d}  encoded {got.b}*2^{got.E} = {got.value:>12d}"
          f"  ratio {float(Fraction(got.value, exact)):.9f}  max msg {trace.max_bits}/{trace.budget} bits")

# %% Every node sampled, exact arithmetic: the estimate is exact betweenness.
g = gen_barbell(5)
res = bc_setup(g, mode="exact", force_all=True)
print("\nexact mode equals oracle:", res.estimates == exact_betweenness(g))

# %% Adaptive sampling: the hub joining two cliques carries every cross pair.
g = gen_barbell(30)
true = exact_betweenness(g)[g.n]
for seed in range(5):
    res = bc_setup(g, eps_prime=0.1, seed=seed)
    est = res.estimates[g.n]
    print(f"seed {seed}: hub estimate {float(est):7.1f} (true {float(true):.0f}), "
          f"{res.samples_total} samples, {res.rounds_used} rounds")
