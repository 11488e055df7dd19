"""Tree and map bijections.

Two bijections live here.

* Between one-type trees and two-type trees (white at even depth).  A black
  vertex of degree k corresponds to an internal vertex with k children,
  white vertices correspond to leaves.  The one-type tree is rooted at the
  first child of the two-type root; the two-type tree is rooted at the last
  leaf of the one-type tree.
* Between labelled two-type trees with a sign and pointed rooted bipartite
  maps.  Every white corner is joined to the next corner, in cyclic contour
  order, whose label is one smaller; corners of minimal label are joined to
  an extra vertex.  Black vertices become faces of twice their degree.

In the map produced from a labelled tree, half-edge 2i is the edge drawn
from the i-th white corner and half-edge 2i+1 its twin.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .maps import InvalidMapError, PlanarMap
from .sampling import InvalidLabellingError, LabelledTree
from .trees import PlaneTree

__all__ = [
    "js_forward",
    "js_inverse",
    "js_forward_labelled",
    "js_inverse_labelled",
    "white_corners",
    "bdg_build_map",
    "bdg_inverse",
    "corner_vertices",
    "corner_labels",
    "vertex_labels",
]


# ---------------------------------------------------------------------------
# one-type <-> two-type
# ---------------------------------------------------------------------------


def js_forward(tree2: PlaneTree) -> tuple[PlaneTree, np.ndarray]:
    """Two-type tree to one-type tree.

    Returns the tree and ``order`` with ``order[j]`` the two-type vertex that
    becomes the j-th vertex (in preorder) of the one-type tree.
    """
    kids, order = K.js_forward_kernel(tree2.kids, tree2.parent, tree2.depth, tree2.contour)
    return PlaneTree(kids, validate=False), order


def js_inverse(tree: PlaneTree) -> tuple[PlaneTree, np.ndarray]:
    """One-type tree to two-type tree.

    Returns the tree and ``order`` with ``order[v]`` the one-type vertex
    that becomes two-type vertex v.
    """
    kids2, order = K.js_inverse_kernel(tree.kids, tree.parent, tree.subtree_size)
    return PlaneTree(kids2, validate=False), order


def js_forward_labelled(lt2: LabelledTree) -> LabelledTree:
    tree, order = js_forward(lt2.tree)
    return LabelledTree(tree, lt2.labels[order])


def js_inverse_labelled(lt: LabelledTree) -> LabelledTree:
    """Labels of leaves go to white vertices; a black vertex keeps the label
    of its vertex in the one-type tree, which equals its white parent's."""
    tree2, order = js_inverse(lt.tree)
    return LabelledTree(tree2, lt.labels[order], two_type=True)


# ---------------------------------------------------------------------------
# labelled two-type tree <-> pointed rooted map
# ---------------------------------------------------------------------------


def white_corners(tree2: PlaneTree) -> np.ndarray:
    """Vertices c_0, ..., c_N met at even contour times."""
    return tree2.contour[0::2]


def bdg_build_map(lt2: LabelledTree, eps: int = 1) -> PlanarMap:
    """Pointed rooted map of a labelled two-type tree.

    With ``eps = +1`` the root half-edge leaves the root vertex of the tree
    (corner 0); with ``eps = -1`` it is the twin.
    """
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    tree2 = lt2.tree
    if tree2.n_edges == 0:
        raise InvalidLabellingError("the single-vertex tree has no map")
    wc = white_corners(tree2)[:-1]
    lab = lt2.labels[wc]
    twin, nextv, succ = K.bdg_kernel(wc, lab, tree2.n_vertices)
    m = PlanarMap(twin, nextv, 0 if eps == 1 else 1, None, validate=False)
    i_min = int(np.flatnonzero(succ < 0)[0])
    m.star = int(m.vertex_of[2 * i_min + 1])
    return m


def corner_vertices(m: PlanarMap) -> np.ndarray:
    """Map vertex of each white corner, for maps built by ``bdg_build_map``."""
    return m.vertex_of[0::2]


def corner_labels(lt2: LabelledTree) -> np.ndarray:
    """Labels along the white contour, corners 0..N-1."""
    return lt2.labels[white_corners(lt2.tree)[:-1]]


def bdg_inverse(m: PlanarMap) -> tuple[LabelledTree, int]:
    """Labelled two-type tree and sign of a pointed rooted bipartite map."""
    if m.star is None:
        raise InvalidMapError("map has no distinguished vertex")
    dist = m.distances_from(m.star)
    if (dist < 0).any():
        raise InvalidMapError("map is not connected")
    vo = m.vertex_of
    gap = dist[vo[m.twin]] - dist[vo]
    if (np.abs(gap) != 1).any():
        raise InvalidMapError("map is not bipartite")
    r = m.root
    if gap[r] == -1:
        h0, eps = r, 1
    else:
        h0, eps = int(m.twin[r]), -1
    kids2, white_of, nv = K.mobile_from_map(
        m.twin, m.nextv, vo, m.first_halfedge, dist, m.face_of, m.n_faces, h0, True)
    if nv != m.n_edges + 1:
        raise InvalidMapError("face structure does not give a tree")
    tree2 = PlaneTree(kids2)
    white = tree2.is_white()
    lab = np.empty(tree2.n_vertices, np.int64)
    lab[white] = dist[white_of[white]]
    blacks = np.flatnonzero(~white)
    lab[blacks] = lab[tree2.parent[blacks]]
    lab -= lab[0]
    return LabelledTree(tree2, lab, two_type=True), eps


def vertex_labels(m: PlanarMap, lt2: LabelledTree) -> np.ndarray:
    """Labels indexed by map vertex; the star gets min label - 1."""
    lab = corner_labels(lt2)
    out = np.empty(m.n_vertices, np.int64)
    out[corner_vertices(m)] = lab
    out[m.star] = lab.min() - 1
    return out
