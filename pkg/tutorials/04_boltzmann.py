# %% [markdown]
# # Boltzmann weights, criticality and conditioned trees
#
# Two worked weight sequences: all face weights equal to one (not critical,
# but tiltable), and q_2 = 1/12 (critical quadrangulations).

# %%
from collections import Counter

from planarmaps import (Conditioning, WeightSequence, audit, classify, sample_boltzmann_map,
                        sample_conditioned_gw, tilt_solve)

quad = WeightSequence.quad_critical()
sol = classify(quad)
print(sol.classification, "Z* =", sol.zstar, "Sigma^2 =", sol.sigma2)
print("offspring law p_q:", [round(sol.law()(k), 4) for k in range(4)])

# %%
ones = WeightSequence.all_ones()
print(classify(ones).classification)
t = tilt_solve(ones)
print("tilt x =", t.x, " constant g/(x^2 g'') =", t.constant, " rescale =", t.rescale)
mu = t.law()
print("mu(0..4):", [round(mu(k), 5) for k in range(5)], " mean", round(mu.mean(), 10))

# %% [markdown]
# Conditioned trees: the counts sampler and the literal walk sampler have the
# same law; here both are compared on binary trees with 3 internal vertices.

# %%
law = sol.law()
S = Conditioning.F()
for method in ("counts", "walk"):
    c = Counter(sample_conditioned_gw(law, S, 3, s, method=method).to_string()
                for s in range(5000))
    print(method, sorted(c.items()))

# %%
smp = sample_boltzmann_map(quad, Conditioning.F(), 2000, seed=4)
print(audit(smp.map).summary().split(" faces")[0])
smp = sample_boltzmann_map(ones, Conditioning.E(), 2001, seed=4)
print(audit(smp.map).summary().split(" faces")[0])
