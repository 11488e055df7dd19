"""Plane trees, degree sequences and their path encodings.

A plane tree is stored as the sequence of child counts of its vertices
listed in preorder (lexicographic order of Ulam-Harris words).  The j-th
entry is the vertex u_j, so vertex identity is simply the preorder index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from . import _kernels as K

__all__ = [
    "AtLeast",
    "ALL",
    "POSITIVE",
    "DegreeSequence",
    "PlaneTree",
    "EncodedPaths",
    "SpineProfile",
    "InvalidTreeError",
    "InvalidDegreeSequenceError",
    "lukasiewicz_path",
    "height_process",
    "height_from_lukasiewicz",
    "modified_height",
    "modified_height_from_lukasiewicz",
    "contour_process",
    "white_contour",
    "encode",
    "spine_profile",
    "prefix_class_counts",
    "two_type_degree_sequence",
]


class InvalidTreeError(ValueError):
    pass


class InvalidDegreeSequenceError(ValueError):
    pass


class AtLeast:
    """The set {lo, lo+1, ...} of child counts."""

    def __init__(self, lo: int):
        self.lo = int(lo)

    def __contains__(self, k) -> bool:
        return k >= self.lo

    def __repr__(self) -> str:
        return f"AtLeast({self.lo})"

    def __eq__(self, other) -> bool:
        return isinstance(other, AtLeast) and other.lo == self.lo

    def __hash__(self) -> int:
        return hash(("AtLeast", self.lo))


ALL = AtLeast(0)
POSITIVE = AtLeast(1)

ChildSet = Union[AtLeast, Iterable[int], Callable[[int], bool]]


def membership(values: np.ndarray, A: ChildSet) -> np.ndarray:
    """Boolean mask of ``values`` lying in the child-count set ``A``."""
    values = np.asarray(values)
    if isinstance(A, AtLeast):
        return values >= A.lo
    if callable(A) and not isinstance(A, (set, frozenset, list, tuple)):
        return np.fromiter((bool(A(int(v))) for v in values), bool, len(values))
    return np.isin(values, np.fromiter(A, np.int64))


def set_contains(A: ChildSet, k: int) -> bool:
    if isinstance(A, AtLeast):
        return k >= A.lo
    if callable(A) and not isinstance(A, (set, frozenset, list, tuple)):
        return bool(A(k))
    return k in A


# ---------------------------------------------------------------------------
# degree sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeSequence:
    """Numbers n_i of vertices with i children, for i >= 1.

    The number of leaves is forced: n_0 = 1 + sum_i (i-1) n_i.
    """

    counts: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for i, c in dict(self.counts).items():
            i, c = int(i), int(c)
            if i < 1:
                raise InvalidDegreeSequenceError(
                    f"child counts must be >= 1, got key {i} (leaves are implied)")
            if c < 0:
                raise InvalidDegreeSequenceError(f"negative count n_{i} = {c}")
            if c:
                clean[i] = c
        object.__setattr__(self, "counts", dict(sorted(clean.items())))

    # -- constructors --------------------------------------------------------
    @classmethod
    def angulation(cls, kappa: int, n_faces: int) -> "DegreeSequence":
        """Degree sequence whose maps are 2kappa-angulations with n faces."""
        if kappa < 1 or n_faces < 0:
            raise InvalidDegreeSequenceError("need kappa >= 1 and n >= 0")
        return cls({kappa: n_faces})

    @classmethod
    def from_child_counts(cls, child_counts: Sequence[int]) -> "DegreeSequence":
        vals, cnt = np.unique(np.asarray(child_counts, dtype=np.int64),
                              return_counts=True)
        ds = cls({int(v): int(c) for v, c in zip(vals, cnt) if v >= 1})
        n0 = int(cnt[vals == 0].sum()) if (vals == 0).any() else 0
        if n0 != ds.n_leaves:
            raise InvalidDegreeSequenceError(
                f"{n0} leaves but the other counts force {ds.n_leaves}")
        return ds

    # -- derived quantities --------------------------------------------------
    @property
    def n_internal(self) -> int:
        return sum(self.counts.values())

    @property
    def n_edges(self) -> int:
        return sum(i * c for i, c in self.counts.items())

    @property
    def n_leaves(self) -> int:
        return 1 + sum((i - 1) * c for i, c in self.counts.items())

    @property
    def n_vertices(self) -> int:
        return self.n_edges + 1

    @property
    def max_degree(self) -> int:
        return max(self.counts, default=0)

    def count(self, i: int) -> int:
        if i == 0:
            return self.n_leaves
        return self.counts.get(i, 0)

    def full_counts(self) -> dict[int, int]:
        """All n_i including i = 0."""
        out = {0: self.n_leaves}
        out.update(self.counts)
        return out

    def empirical_law(self) -> dict[int, Fraction]:
        """p_n(i) = n_i / (N + 1)."""
        tot = self.n_vertices
        return {i: Fraction(c, tot) for i, c in self.full_counts().items()}

    def variance(self) -> Fraction:
        """Variance of the empirical law; its mean is N/(N+1)."""
        p = self.empirical_law()
        mean = Fraction(self.n_edges, self.n_vertices)
        return sum((Fraction(i * i) * q for i, q in p.items()), Fraction(0)) - mean * mean

    def steps(self) -> np.ndarray:
        """Multiset of Lukasiewicz steps i - 1, sorted."""
        fc = self.full_counts()
        return np.repeat(np.array([i - 1 for i in fc], np.int64),
                         np.array(list(fc.values()), np.int64))

    def child_count_multiset(self) -> np.ndarray:
        return self.steps() + 1

    def __str__(self) -> str:
        return " ".join(f"{i}:{c}" for i, c in self.counts.items()) or "(empty)"


# ---------------------------------------------------------------------------
# plane trees
# ---------------------------------------------------------------------------


class PlaneTree:
    """Finite rooted plane tree stored as preorder child counts."""

    def __init__(self, kids: Sequence[int], validate: bool = True):
        arr = np.array(kids, dtype=np.int64).reshape(-1)
        if validate:
            _check_kids(arr)
        arr.setflags(write=False)
        self._kids = arr

    @property
    def kids(self) -> np.ndarray:
        return self._kids

    @property
    def n_vertices(self) -> int:
        return int(self._kids.shape[0])

    @property
    def n_edges(self) -> int:
        return self.n_vertices - 1

    @cached_property
    def _structure(self):
        return K.tree_structure(self._kids)

    @property
    def parent(self) -> np.ndarray:
        return self._structure[0]

    @property
    def depth(self) -> np.ndarray:
        return self._structure[1]

    @property
    def child_rank(self) -> np.ndarray:
        """1-based position of each vertex among its siblings (0 for root)."""
        return self._structure[2]

    @property
    def subtree_size(self) -> np.ndarray:
        return self._structure[3]

    @cached_property
    def contour(self) -> np.ndarray:
        """Vertex ids visited by the contour walk (2N+1 entries)."""
        return K.contour_sequence(self._kids, self.parent, self.subtree_size)

    def children(self, v: int) -> list[int]:
        out, c = [], v + 1
        for _ in range(int(self._kids[v])):
            out.append(c)
            c += int(self.subtree_size[c])
        return out

    def ancestors(self, v: int) -> list[int]:
        """Strict ancestors of v from the root down."""
        out, p = [], int(self.parent[v])
        while p >= 0:
            out.append(p)
            p = int(self.parent[p])
        return out[::-1]

    def word(self, v: int) -> tuple[int, ...]:
        """Ulam-Harris word of v."""
        path = self.ancestors(v)[1:] + [v] if v else []
        return tuple(int(self.child_rank[u]) for u in path)

    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self._kids == 0)

    def degree_sequence(self) -> DegreeSequence:
        return DegreeSequence.from_child_counts(self._kids)

    def is_white(self) -> np.ndarray:
        """Parity view used for two-type trees: even depth is white."""
        return self.depth % 2 == 0

    # -- text format ---------------------------------------------------------
    def to_string(self) -> str:
        return " ".join(map(str, self._kids.tolist()))

    @classmethod
    def from_string(cls, text: str) -> "PlaneTree":
        try:
            vals = [int(t) for t in text.split()]
        except ValueError as exc:
            raise InvalidTreeError(f"non-integer token in tree line: {exc}") from None
        return cls(vals)

    def __eq__(self, other) -> bool:
        return isinstance(other, PlaneTree) and np.array_equal(self._kids, other._kids)

    def __hash__(self) -> int:
        return hash(self._kids.tobytes())

    def __len__(self) -> int:
        return self.n_vertices

    def __repr__(self) -> str:
        if self.n_vertices <= 20:
            return f"PlaneTree([{', '.join(map(str, self._kids.tolist()))}])"
        return f"PlaneTree(<{self.n_edges} edges>)"


def _check_kids(arr: np.ndarray) -> None:
    if arr.size == 0:
        raise InvalidTreeError("empty child-count sequence")
    if (arr < 0).any():
        raise InvalidTreeError("negative child count")
    s = np.cumsum(arr - 1)
    if s[-1] != -1:
        raise InvalidTreeError(
            f"child counts sum to {int(arr.sum())}, need {arr.size - 1}")
    if arr.size > 1 and (s[:-1] < 0).any():
        bad = int(np.argmax(s[:-1] < 0))
        raise InvalidTreeError(f"sequence closes the tree early at position {bad}")


SINGLETON = PlaneTree([0])


# ---------------------------------------------------------------------------
# encodings
# ---------------------------------------------------------------------------


def lukasiewicz_path(tree: PlaneTree) -> np.ndarray:
    """W(0) = 0, W(j+1) = W(j) + k_{u_j} - 1; length N + 2."""
    return np.concatenate(([0], np.cumsum(tree.kids - 1)))


def height_process(tree: PlaneTree) -> np.ndarray:
    """Depth of each vertex in preorder."""
    return tree.depth.copy()


def height_from_lukasiewicz(w: np.ndarray) -> np.ndarray:
    """Heights recomputed from the path: #{i<j : W(i) <= min W[i+1..j]}."""
    return K.record_count(np.asarray(w, np.int64), False)


def modified_height(tree: PlaneTree) -> np.ndarray:
    """Strict ancestors w of u whose last child is not an ancestor-or-self of u."""
    return K.modified_height(tree.kids, tree.parent, tree.child_rank)


def modified_height_from_lukasiewicz(w: np.ndarray) -> np.ndarray:
    """Same quantity from the path: #{i<j : W(i) < min W[i+1..j]}."""
    return K.record_count(np.asarray(w, np.int64), True)


def contour_process(tree: PlaneTree) -> np.ndarray:
    """Depth along the contour walk: 2N+1 values, 0 at both ends."""
    return tree.depth[tree.contour]


def white_contour(tree: PlaneTree) -> np.ndarray:
    """Half the contour at even times; the white-vertex heights."""
    c = contour_process(tree)
    return c[0::2] // 2


@dataclass(frozen=True)
class EncodedPaths:
    lukasiewicz: np.ndarray
    height: np.ndarray
    contour: np.ndarray
    modified_height: np.ndarray


def encode(tree: PlaneTree) -> EncodedPaths:
    return EncodedPaths(lukasiewicz_path(tree), height_process(tree),
                        contour_process(tree), modified_height(tree))


# ---------------------------------------------------------------------------
# ancestral line statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpineProfile:
    """Statistics of the ancestral line of a vertex.

    ``A[i]`` counts strict ancestors with i children, ``lr`` is
    1 + sum_i (i-1) A_i, and ``content`` lists (k_parent(v), rank(v)) for
    the vertices v on the line below the root, ordered by height.
    """

    A: dict[int, int]
    lr: int
    content: tuple[tuple[int, int], ...]

    @property
    def height(self) -> int:
        return len(self.content)


def spine_profile(tree: PlaneTree, v: int) -> SpineProfile:
    if not 0 <= v < tree.n_vertices:
        raise IndexError(f"vertex {v} out of range for a tree with {tree.n_vertices} vertices")
    anc = tree.ancestors(v)
    kids = tree.kids
    A: dict[int, int] = {}
    for a in anc:
        k = int(kids[a])
        A[k] = A.get(k, 0) + 1
    lr = 1 + sum((i - 1) * c for i, c in A.items())
    line = anc[1:] + [v] if v else []
    content = tuple((int(kids[tree.parent[u]]), int(tree.child_rank[u])) for u in line)
    return SpineProfile(dict(sorted(A.items())), lr, content)


def prefix_class_counts(tree: PlaneTree, A: ChildSet) -> np.ndarray:
    """Lambda(i) = #{0 <= j <= i-1 : k_{u_j} in A} for i = 0..N+1."""
    return np.concatenate(([0], np.cumsum(membership(tree.kids, A)))).astype(np.int64)


def two_type_degree_sequence(tree: PlaneTree) -> DegreeSequence:
    """n_i = number of black vertices of degree i (children + 1)."""
    black = ~tree.is_white()
    deg = tree.kids[black] + 1
    vals, cnt = np.unique(deg, return_counts=True)
    return DegreeSequence({int(v): int(c) for v, c in zip(vals, cnt)})
