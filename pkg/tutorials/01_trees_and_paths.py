# %% [markdown]
# # Plane trees and their coding paths
#
# A tree is stored as its child counts in preorder.  Everything else
# (parents, depths, the three coding walks) is derived from that array.

# %%
import numpy as np

from planarmaps import DegreeSequence, PlaneTree, sample_tree
from planarmaps.trees import (contour_process, height_process, lukasiewicz_path,
                              modified_height, spine_profile)

t = PlaneTree([3, 0, 1, 0, 0])
print("kids      ", t.kids.tolist())
print("W (Luk.)  ", lukasiewicz_path(t).tolist())
print("H         ", height_process(t).tolist())
print("C         ", contour_process(t).tolist())
# only ancestors whose child towards v is not the last one count
print("H tilde   ", modified_height(t).tolist())

# %% [markdown]
# The spine of a vertex records how many ancestors have i children, and where
# along each ancestor the path turns.

# %%
sp = spine_profile(t, 3)
print(sp.A, sp.lr, sp.content)

# %% [markdown]
# Uniform trees with a prescribed degree sequence come from shuffling the
# steps and rotating at the first minimum.

# %%
ds = DegreeSequence({1: 3000, 2: 2000, 5: 500})
big = sample_tree(ds, seed=1)
print(big.n_vertices, "vertices, height", big.depth.max())
print("degree sequence kept:", big.degree_sequence() == ds)

H = height_process(big)
Ht = modified_height(big)
n0 = int((big.kids == 0).sum())
print("max |Ht - (n0-1)/N H| / sqrt(N) =",
      np.abs(Ht - (n0 - 1) / big.n_edges * H).max() / np.sqrt(big.n_edges))
