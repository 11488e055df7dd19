# %% [markdown]
# # Finite-size checks around the scaling limit
#
# None of these estimate a limit.  They watch quantities that must shrink,
# stay put after rescaling, or hold exactly at every size.

# %%
import numpy as np

from planarmaps import (DegreeSequence, contour_height_gap, h_diagnostics, ks_two_sample,
                        lambda_linearity, sample_tree, two_point_identity)
from planarmaps.stats import angulation_law, label_scaling_profile

d = h_diagnostics(DegreeSequence.angulation(2, 1000), angulation_law(2))
print("scaling constant:", d.constant_faces, "=", float(d.constant_faces))

# %% [markdown]
# The modified height tracks (n_0 - 1)/N times the height.

# %%
for n in (1000, 10_000, 100_000):
    ds = DegreeSequence.angulation(2, n)
    g = [contour_height_gap(sample_tree(ds, s)) for s in range(20)]
    print(f"n={n:>6}  median gap {np.median(g):.4f}")

# %%
ds = DegreeSequence.angulation(2, 10_000)
lam = [lambda_linearity(ds, {0}, s) for s in range(20)]
print("leaf-count linearity, max over 20 trees:", round(max(lam), 4))

# %% [markdown]
# Rescaled label suprema at two sizes.

# %%
for row in label_scaling_profile(2, [5000, 20000], replicas=60, seed=1):
    print(row.n_edges, round(row.label_mean, 4), round(row.label_q50, 4))

# %% [markdown]
# Re-rooting: the distance between two uniform vertices has the law of the
# distance from the star to one uniform vertex.

# %%
dxy, dsy = two_point_identity(DegreeSequence.angulation(2, 1000), 2000, seed=2)
print("means", dxy.mean(), dsy.mean(), " KS", ks_two_sample(dxy, dsy))
shifted = dsy + 1
print("shifted control KS p =", ks_two_sample(dxy, shifted)[1])
