# %% [markdown]
# # Counting trees, labellings and bridges

# %%
from math import comb

import numpy as np

from planarmaps import DegreeSequence, count_labellings, count_trees, enumerate_trees
from planarmaps.sampling import count_label_bridges, enumerate_label_bridges, sample_label_bridge
from planarmaps.stats import bridge_half_minima, bridge_maxgap_dichotomy

ds = DegreeSequence({3: 1, 1: 1})
for t in enumerate_trees(ds):
    print(t.to_string(), " labellings:", count_labellings(t))
print("count_trees:", count_trees(ds))

# %%
for r in range(1, 7):
    print(r, count_label_bridges(r), comb(2 * r - 1, r - 1))
print(list(enumerate_label_bridges(3)))

# %% [markdown]
# A large gap between max and min of a bridge forces a deep dip in one of
# the four half-walks.

# %%
rng = np.random.default_rng(0)
b = sample_label_bridge(150, rng)
print("range", b.max() - b.min(), " half minima", bridge_half_minima(b))
bad = sum(not bridge_maxgap_dichotomy(sample_label_bridge(int(rng.integers(1, 201)), rng),
                                      float(rng.uniform(0, 5)))
          for _ in range(10_000))
print("counterexamples in 10^4 bridges:", bad)
