# %% [markdown]
# # From labelled trees to maps and back
#
# A labelled one-type tree goes to a labelled two-type tree (mobile) and
# then to a pointed rooted bipartite map.  Both steps are invertible.

# %%
from planarmaps import (DegreeSequence, audit, bdg_build_map, bdg_inverse, js_forward_labelled,
                        js_inverse_labelled, label_tree, sample_tree)
from planarmaps.bijections import vertex_labels

ds = DegreeSequence({2: 6, 3: 2})        # six quadrangles and two hexagons
lt = label_tree(sample_tree(ds, seed=3), seed=3)
print("one-type tree:", lt.to_string())

mobile = js_inverse_labelled(lt)
print("two-type tree:", mobile.to_string())
print("back again    :", js_forward_labelled(mobile) == lt)

# %%
m = bdg_build_map(mobile, eps=-1)
print(audit(m).summary())
print("inverse recovers (mobile, eps):", bdg_inverse(m) == (mobile, -1))

# %% [markdown]
# Labels are distances to the distinguished vertex, up to a shift.

# %%
vl = vertex_labels(m, mobile)
d = m.distances_from(m.star)
print("d(star, .)        ", d.tolist())
print("labels - min + 1  ", [int(x - vl.min()) for x in vl])

# %%
# text format: header 'E root star', then 'h twin[h] nextv[h]'
print("\n".join(m.to_string().splitlines()[:6]))
