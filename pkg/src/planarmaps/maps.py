"""Rooted planar maps as half-edge arrays.

``twin[h]`` is the opposite half-edge and ``nextv[h]`` the next half-edge
counterclockwise around the tail of h.  Vertices are the cycles of
``nextv`` and faces the cycles of ``h -> nextv[twin[h]]``; both are
numbered by their smallest half-edge.  The root is a half-edge and the
optional distinguished vertex ``star`` is a vertex id.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels as K
from .rng import SeedLike, make_rng

__all__ = [
    "PlanarMap",
    "InvalidMapError",
    "AuditReport",
    "audit",
    "bfs_distances",
    "label_distance_check",
    "distance_upper_bound_check",
    "range_min_table",
    "PointedSample",
    "sample_pointed",
    "sample_uniform_map",
]


class InvalidMapError(ValueError):
    pass


class PlanarMap:
    def __init__(self, twin: Sequence[int], nextv: Sequence[int], root: int = 0,
                 star: Optional[int] = None, validate: bool = True):
        tw = np.array(twin, dtype=np.int64).reshape(-1)
        nv = np.array(nextv, dtype=np.int64).reshape(-1)
        if validate:
            _check_arrays(tw, nv, root)
        tw.setflags(write=False)
        nv.setflags(write=False)
        self.twin = tw
        self.nextv = nv
        self.root = int(root)
        self.star = None if star is None else int(star)
        if validate and self.star is not None and not 0 <= self.star < self.n_vertices:
            raise InvalidMapError(f"star vertex {self.star} out of range")

    # -- combinatorics ---------------------------------------------------------
    @property
    def n_edges(self) -> int:
        return self.twin.shape[0] // 2

    @cached_property
    def _vertices(self):
        return K.orbit_ids(self.nextv)

    @property
    def vertex_of(self) -> np.ndarray:
        """Tail vertex of every half-edge."""
        return self._vertices[0]

    @property
    def n_vertices(self) -> int:
        return int(self._vertices[1])

    @cached_property
    def first_halfedge(self) -> np.ndarray:
        out = np.full(self.n_vertices, -1, np.int64)
        vo = self.vertex_of
        # half-edges scanned backwards so the smallest one wins
        out[vo[::-1]] = np.arange(vo.shape[0] - 1, -1, -1)
        return out

    @cached_property
    def face_permutation(self) -> np.ndarray:
        return self.nextv[self.twin]

    @cached_property
    def _faces(self):
        return K.orbit_ids(self.face_permutation)

    @property
    def face_of(self) -> np.ndarray:
        return self._faces[0]

    @property
    def n_faces(self) -> int:
        return int(self._faces[1])

    def face_degrees(self) -> np.ndarray:
        return np.bincount(self.face_of, minlength=self.n_faces)

    def vertex_degrees(self) -> np.ndarray:
        return np.bincount(self.vertex_of, minlength=self.n_vertices)

    def head(self, h: int) -> int:
        return int(self.vertex_of[self.twin[h]])

    def tail(self, h: int) -> int:
        return int(self.vertex_of[h])

    @property
    def root_vertex(self) -> int:
        return int(self.vertex_of[self.root])

    def distances_from(self, v: int) -> np.ndarray:
        return K.bfs_halfedges(self.twin, self.vertex_of, self.n_vertices,
                               self.first_halfedge, self.nextv, int(v))

    # -- canonical form ----------------------------------------------------------
    def canonical(self) -> "PlanarMap":
        """Relabelled copy: half-edges numbered by discovery from the root."""
        new, seen = K.canonical_relabel(self.twin, self.nextv, self.root)
        if seen != self.twin.shape[0]:
            raise InvalidMapError("map is not connected")
        m = new.shape[0]
        tw = np.empty(m, np.int64)
        nv = np.empty(m, np.int64)
        tw[new] = new[self.twin]
        nv[new] = new[self.nextv]
        out = PlanarMap(tw, nv, 0, None, validate=False)
        if self.star is not None:
            out.star = int(out.vertex_of[new[self.first_halfedge[self.star]]])
        return out

    def canonical_key(self) -> bytes:
        c = self.canonical()
        star = -1 if c.star is None else c.star
        return c.twin.tobytes() + c.nextv.tobytes() + np.int64(star).tobytes()

    def same_as(self, other: "PlanarMap") -> bool:
        """Equality up to root- and star-preserving isomorphism."""
        return self.canonical_key() == other.canonical_key()

    def forget_star(self) -> "PlanarMap":
        return PlanarMap(self.twin, self.nextv, self.root, None, validate=False)

    # -- text format ------------------------------------------------------------
    def to_string(self) -> str:
        star = -1 if self.star is None else self.star
        lines = [f"{self.n_edges} {self.root} {star}"]
        lines += [f"{h} {t} {n}" for h, (t, n) in
                  enumerate(zip(self.twin.tolist(), self.nextv.tolist()))]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_string(cls, text: str) -> "PlanarMap":
        rows = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 3:
            raise InvalidMapError("map header must be 'E root star'")
        try:
            E, root, star = (int(x) for x in rows[0])
            body = [[int(x) for x in r] for r in rows[1:]]
        except ValueError:
            raise InvalidMapError("non-integer token in map file") from None
        if len(body) != 2 * E or any(len(r) != 3 for r in body):
            raise InvalidMapError(f"expected {2 * E} lines 'h twin nextv'")
        twin = np.empty(2 * E, np.int64)
        nextv = np.empty(2 * E, np.int64)
        seen = set()
        for h, t, n in body:
            if not 0 <= h < 2 * E or h in seen:
                raise InvalidMapError(f"bad half-edge id {h}")
            seen.add(h)
            twin[h], nextv[h] = t, n
        return cls(twin, nextv, root, None if star < 0 else star)

    def __repr__(self) -> str:
        return (f"PlanarMap(E={self.n_edges}, V={self.n_vertices}, F={self.n_faces}, "
                f"root={self.root}, star={self.star})")


def _check_arrays(tw: np.ndarray, nv: np.ndarray, root: int) -> None:
    m = tw.shape[0]
    if m == 0 or m % 2 or nv.shape[0] != m:
        raise InvalidMapError("need 2E > 0 half-edges in both arrays")
    if tw.min() < 0 or tw.max() >= m or nv.min() < 0 or nv.max() >= m:
        raise InvalidMapError("half-edge id out of range")
    idx = np.arange(m)
    if not np.array_equal(tw[tw], idx) or (tw == idx).any():
        raise InvalidMapError("twin must be a fixed-point-free involution")
    if np.unique(nv).shape[0] != m:
        raise InvalidMapError("nextv must be a permutation")
    if not 0 <= root < m:
        raise InvalidMapError("root half-edge out of range")


# ---------------------------------------------------------------------------
# audits and distance checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AuditReport:
    V: int
    E: int
    F: int
    face_degrees: dict[int, int]
    euler_ok: bool
    bipartite: bool
    connected: bool

    @property
    def ok(self) -> bool:
        return self.euler_ok and self.connected and self.bipartite

    def summary(self) -> str:
        degs = " ".join(f"{d}:{c}" for d, c in sorted(self.face_degrees.items()))
        return (f"V={self.V} E={self.E} F={self.F} euler={'ok' if self.euler_ok else 'FAIL'} "
                f"bipartite={'yes' if self.bipartite else 'no'} faces[{degs}]")


def audit(m: PlanarMap) -> AuditReport:
    new, seen = K.canonical_relabel(m.twin, m.nextv, m.root)
    connected = seen == m.twin.shape[0]
    V, E, F = m.n_vertices, m.n_edges, m.n_faces
    d = m.distances_from(0)
    vo = m.vertex_of
    if (d < 0).any():
        bip = False
    else:
        bip = bool(((d[vo] - d[vo[m.twin]]) % 2 == 1).all())
    fd = Counter(m.face_degrees().tolist())
    return AuditReport(V, E, F, dict(fd), V - E + F == 2, bip, connected)


def bfs_distances(m: PlanarMap, source: int) -> np.ndarray:
    return m.distances_from(source)


def label_distance_check(m: PlanarMap, vertex_labels: Iterable[int]) -> int:
    """Max over non-star v of |d(star, v) - (l(v) - min l + 1)|.

    ``vertex_labels`` is indexed by map vertex id; the star entry is ignored.
    """
    if m.star is None:
        raise InvalidMapError("map has no distinguished vertex")
    lab = np.asarray(vertex_labels, np.int64)
    mask = np.ones(m.n_vertices, bool)
    mask[m.star] = False
    d = m.distances_from(m.star)
    lo = lab[mask].min()
    return int(np.abs(d[mask] - (lab[mask] - lo + 1)).max())


def range_min_table(values: np.ndarray) -> list[np.ndarray]:
    """Sparse table for O(1) range minima."""
    tab = [np.asarray(values, np.int64)]
    k = 1
    while 2 * k <= tab[0].shape[0]:
        prev = tab[-1]
        tab.append(np.minimum(prev[:-k], prev[k:]))
        k *= 2
    return tab


def _range_min(tab: list[np.ndarray], a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """min values[a..b] inclusive, elementwise."""
    length = b - a + 1
    lev = np.floor(np.log2(length)).astype(np.int64)
    out = np.empty(a.shape[0], np.int64)
    for L in np.unique(lev).tolist():
        sel = lev == L
        t = tab[L]
        out[sel] = np.minimum(t[a[sel]], t[b[sel] - (1 << L) + 1])
    return out


def distance_upper_bound_check(m: PlanarMap, corner_labels: Sequence[int],
                               pairs: np.ndarray,
                               corner_vertex: Optional[Sequence[int]] = None) -> int:
    """Number of corner pairs (i, j) violating the two-arc label bound.

    Corners are indexed 0..N with corner N identified with corner 0.  By
    default corner i is the tail of half-edge 2i, which is how maps built
    from labelled trees are laid out.
    """
    lab = np.asarray(corner_labels, np.int64)
    N = lab.shape[0]
    if corner_vertex is None:
        corner_vertex = m.vertex_of[0::2]
    cv = np.asarray(corner_vertex, np.int64)
    pairs = np.asarray(pairs, np.int64).reshape(-1, 2)
    i = np.minimum(pairs[:, 0], pairs[:, 1]) % (N + 1)
    j = np.maximum(pairs[:, 0], pairs[:, 1]) % (N + 1)
    i, j = np.minimum(i, j), np.maximum(i, j)
    ext = np.concatenate((lab, lab, lab[:1]))
    tab = range_min_table(ext)
    m1 = _range_min(tab, i, j)
    m2 = _range_min(tab, j, N + i)
    bound = ext[i] + ext[j] - 2 * np.maximum(m1, m2) + 2
    vi = cv[i % N]
    vj = cv[j % N]
    d = np.empty(i.shape[0], np.int64)
    for src in np.unique(vi).tolist():
        sel = vi == src
        dist = m.distances_from(src)
        d[sel] = dist[vj[sel]]
    return int((d > bound).sum())


# ---------------------------------------------------------------------------
# uniform sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PointedSample:
    """A sampled map together with the labelled tree it was built from."""

    map: PlanarMap
    tree: object  # LabelledTree, two-type
    eps: int

    @property
    def corner_labels(self) -> np.ndarray:
        from .bijections import corner_labels
        return corner_labels(self.tree)


def sample_pointed(ds, seed: SeedLike = None) -> PointedSample:
    """Uniform pointed rooted map with face degrees 2i (n_i of each)."""
    from .bijections import bdg_build_map, js_inverse_labelled
    from .sampling import label_tree, sample_tree

    if ds.n_edges < 1:
        raise ValueError("a map needs at least one edge")
    rng = make_rng(seed)
    lt = label_tree(sample_tree(ds, rng), rng)
    lt2 = js_inverse_labelled(lt)
    eps = 1 if rng.random() < 0.5 else -1
    return PointedSample(bdg_build_map(lt2, eps), lt2, eps)


def sample_uniform_map(ds, seed: SeedLike = None, pointed: bool = True) -> PlanarMap:
    """Uniform element of the pointed (or, with ``pointed=False``, unpointed)
    rooted bipartite maps with n_i faces of degree 2i.

    Forgetting the point keeps uniformity since all such maps have the same
    number n_0 + 1 of vertices.
    """
    m = sample_pointed(ds, seed).map
    return m if pointed else m.forget_star()
