# %% [markdown]
# # Uniform random quadrangulations
#
# Sample, audit, and look at distances from the distinguished vertex.

# %%
import time

import numpy as np

from planarmaps import DegreeSequence, audit, sample_pointed
from planarmaps.bijections import corner_labels, vertex_labels
from planarmaps.maps import distance_upper_bound_check, label_distance_check

ds = DegreeSequence.angulation(2, 10_000)   # 10^4 quadrangles
tic = time.time()
smp = sample_pointed(ds, seed=11)
print(f"sampled in {time.time() - tic:.2f}s:", audit(smp.map).summary())

# %%
m = smp.map
d = m.distances_from(m.star)
print("radius from the star:", d.max())
print("profile (first bins):", np.bincount(d)[:12].tolist())
print("label/distance defect:", label_distance_check(m, vertex_labels(m, smp.tree)))

# %%
lab = corner_labels(smp.tree)
pairs = np.random.default_rng(0).integers(0, lab.shape[0] + 1, size=(5000, 2))
print("upper-bound violations on 5000 pairs:", distance_upper_bound_check(m, lab, pairs))

# %% [markdown]
# Rescaled radius (9/(8n))^{1/4} * max d, for a few sizes.

# %%
for n in (1000, 4000, 16000):
    rad = []
    for s in range(10):
        mm = sample_pointed(DegreeSequence.angulation(2, n), s).map
        rad.append(mm.distances_from(mm.star).max())
    print(n, round((9 / (8 * n)) ** 0.25 * np.mean(rad), 3))
