"""Exact uniform sampling and counting of trees and labellings.

The sampler for a prescribed degree sequence shuffles the multiset of
Lukasiewicz steps and rotates the result cyclically onto an excursion.
Labellings are built from label bridges: sequences 0 = b_0, ..., b_r = 0
with increments >= -1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from . import _kernels as K
from .rng import SeedLike, make_rng
from .trees import DegreeSequence, PlaneTree

__all__ = [
    "LabelledTree",
    "InvalidLabellingError",
    "vervaat_shift",
    "sample_tree",
    "count_trees",
    "count_forests",
    "multinomial",
    "enumerate_trees",
    "enumerate_all_trees",
    "sample_label_bridge",
    "count_label_bridges",
    "enumerate_label_bridges",
    "label_tree",
    "count_labellings",
    "enumerate_labellings",
    "check_one_type_labels",
    "check_two_type_labels",
]


class InvalidLabellingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LabelledTree:
    """A plane tree with integer labels indexed by preorder.

    For ``two_type`` trees the labels of black vertices are ignored by the
    bijections; by convention they equal the label of the white parent.
    """

    tree: PlaneTree
    labels: np.ndarray
    two_type: bool = False

    def __post_init__(self):
        lab = np.array(self.labels, dtype=np.int64).reshape(-1)
        if lab.shape[0] != self.tree.n_vertices:
            raise InvalidLabellingError(
                f"{lab.shape[0]} labels for {self.tree.n_vertices} vertices")
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    def validate(self) -> "LabelledTree":
        if self.two_type:
            check_two_type_labels(self.tree, self.labels)
        else:
            check_one_type_labels(self.tree, self.labels)
        return self

    def key(self) -> bytes:
        return self.tree.kids.tobytes() + b"|" + self.labels.tobytes() + bytes([self.two_type])

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelledTree) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def to_string(self) -> str:
        return self.tree.to_string() + "\t" + " ".join(map(str, self.labels.tolist()))

    @classmethod
    def from_string(cls, text: str, two_type: bool = False) -> "LabelledTree":
        parts = text.rstrip("\n").split("\t")
        if len(parts) != 2:
            raise InvalidLabellingError("labelled tree line needs 'kids<TAB>labels'")
        tree = PlaneTree.from_string(parts[0])
        return cls(tree, [int(t) for t in parts[1].split()], two_type)


# ---------------------------------------------------------------------------
# cycle lemma and tree sampling
# ---------------------------------------------------------------------------


def vervaat_shift(steps: Sequence[int]) -> tuple[np.ndarray, int]:
    """Rotate a sequence with values >= -1 and sum -1 onto an excursion.

    The shift j is the first index in 1..M where the partial sum attains its
    overall minimum; the result is x_{(k+j) mod M}.
    """
    x = np.asarray(steps, dtype=np.int64)
    if x.size == 0:
        raise ValueError("empty step sequence")
    if (x < -1).any():
        raise ValueError("steps must be >= -1")
    s = np.cumsum(x)
    if s[-1] != -1:
        raise ValueError(f"steps sum to {int(s[-1])}, need -1")
    j = int(np.argmin(s)) + 1
    return np.concatenate((x[j:], x[:j])), j


def sample_tree(ds: DegreeSequence, seed: SeedLike = None) -> PlaneTree:
    """Uniform plane tree with degree sequence ``ds``."""
    rng = make_rng(seed)
    steps = ds.steps()
    exc, _ = vervaat_shift(rng.permutation(steps))
    return PlaneTree(exc + 1, validate=False)


def multinomial(parts: Sequence[int]) -> int:
    out, tot = 1, 0
    for c in parts:
        tot += c
        out *= math.comb(tot, c)
    return out


def count_trees(ds: DegreeSequence) -> int:
    """Number of plane trees with degree sequence ``ds``."""
    fc = ds.full_counts()
    m = multinomial(list(fc.values()))
    tot = ds.n_vertices
    q, r = divmod(m, tot)
    assert r == 0
    return q


def count_forests(counts: Mapping[int, int]) -> int:
    """Forests with child-count multiset ``counts`` (keys include 0).

    The number of trees is r = -sum_i (i-1) q_i; the count is
    r/|q| times the multinomial coefficient.
    """
    r = -sum((i - 1) * c for i, c in counts.items())
    tot = sum(counts.values())
    if r <= 0 or tot == 0:
        return 0
    num = r * multinomial(list(counts.values()))
    q, rem = divmod(num, tot)
    assert rem == 0
    return q


def enumerate_trees(ds: DegreeSequence, cap: Optional[int] = None) -> Iterator[PlaneTree]:
    """All trees with degree sequence ``ds`` in lexicographic order of k."""
    fc = ds.full_counts()
    keys = sorted(fc)
    rem = [fc[k] for k in keys]
    total = ds.n_vertices
    seq = [0] * total
    produced = 0

    def rec(pos: int, s: int):
        if pos == total:
            yield PlaneTree(seq, validate=False)
            return
        for idx, k in enumerate(keys):
            if rem[idx] == 0:
                continue
            ns = s + k - 1
            if ns < 0 and pos != total - 1:
                continue
            rem[idx] -= 1
            seq[pos] = k
            yield from rec(pos + 1, ns)
            rem[idx] += 1

    for t in rec(0, 0):
        if cap is not None and produced >= cap:
            raise OverflowError(f"more than {cap} trees")
        produced += 1
        yield t


def enumerate_all_trees(n_edges: int) -> Iterator[PlaneTree]:
    """All plane trees with ``n_edges`` edges."""
    total = n_edges + 1
    seq = [0] * total

    def rec(pos: int, s: int, budget: int):
        # s = current height of the path; budget = children still to place
        if pos == total:
            if s == -1:
                yield PlaneTree(seq, validate=False)
            return
        for k in range(budget + 1):
            ns = s + k - 1
            if ns < 0 and pos != total - 1:
                continue
            if ns >= 0 and pos == total - 1:
                continue
            seq[pos] = k
            yield from rec(pos + 1, ns, budget - k)

    yield from rec(0, 0, n_edges)


# ---------------------------------------------------------------------------
# label bridges and labellings
# ---------------------------------------------------------------------------


def count_label_bridges(r: int) -> int:
    if r < 1:
        raise ValueError("bridge length must be >= 1")
    return math.comb(2 * r - 1, r - 1)


def sample_label_bridge(r: int, seed: SeedLike = None) -> np.ndarray:
    """Uniform element (b_0..b_r) of the bridges with increments >= -1."""
    if r < 1:
        raise ValueError("bridge length must be >= 1")
    rng = make_rng(seed)
    bars = np.sort(rng.choice(2 * r - 1, size=r - 1, replace=False))
    edges = np.concatenate(([-1], bars, [2 * r - 1]))
    y = np.diff(edges) - 1  # stars between consecutive bars
    return np.concatenate(([0], np.cumsum(y - 1)))


def enumerate_label_bridges(r: int) -> Iterator[tuple[int, ...]]:
    if r < 1:
        raise ValueError("bridge length must be >= 1")
    for bars in itertools.combinations(range(2 * r - 1), r - 1):
        edges = (-1,) + bars + (2 * r - 1,)
        b, acc = [0], 0
        for a, c in zip(edges, edges[1:]):
            acc += c - a - 2
            b.append(acc)
        yield tuple(b)


def count_labellings(tree: PlaneTree) -> int:
    out = 1
    for k in tree.kids[tree.kids > 0].tolist():
        out *= math.comb(2 * k - 1, k - 1)
    return out


def label_tree(tree: PlaneTree, seed: SeedLike = None) -> LabelledTree:
    """Uniform one-type labelling: root 0, last child copies its parent,
    and consecutive increments (parent, children...) are >= -1."""
    rng = make_rng(seed)
    kids = tree.kids
    big = kids[kids >= 2]
    reps = big - 1
    total = int(reps.sum())
    if total:
        starts = np.repeat(np.cumsum(reps) - reps, reps)
        lows = np.arange(total, dtype=np.int64) - starts
        highs = np.repeat(2 * big - 1, reps)
        draws = rng.integers(lows, highs)
    else:
        draws = np.zeros(0, np.int64)
    vals = K.bridge_increments(kids, draws)
    lab = K.labels_from_bridges(kids, tree.parent, tree.child_rank, vals)
    return LabelledTree(tree, lab)


def enumerate_labellings(tree: PlaneTree) -> Iterator[LabelledTree]:
    kids = tree.kids
    internal = np.flatnonzero(kids > 0).tolist()
    choices = [list(enumerate_label_bridges(int(kids[u]))) for u in internal]
    parent, rank = tree.parent, tree.child_rank
    n = tree.n_vertices
    slot = {u: i for i, u in enumerate(internal)}
    for combo in itertools.product(*choices):
        lab = [0] * n
        for j in range(1, n):
            p = int(parent[j])
            lab[j] = lab[p] + combo[slot[p]][int(rank[j])]
        yield LabelledTree(tree, lab)


def check_one_type_labels(tree: PlaneTree, labels: np.ndarray) -> None:
    labels = np.asarray(labels)
    if labels[0] != 0:
        raise InvalidLabellingError("root label must be 0")
    for u in np.flatnonzero(tree.kids > 0).tolist():
        ch = tree.children(u)
        seq = [labels[u]] + [labels[c] for c in ch]
        if seq[-1] != labels[u]:
            raise InvalidLabellingError(f"last child of vertex {u} must copy its label")
        if any(b - a < -1 for a, b in zip(seq, seq[1:])):
            raise InvalidLabellingError(f"label decrement below -1 under vertex {u}")


def check_two_type_labels(tree: PlaneTree, labels: np.ndarray) -> None:
    labels = np.asarray(labels)
    if labels[0] != 0:
        raise InvalidLabellingError("root label must be 0")
    white = tree.is_white()
    for u in np.flatnonzero(~white).tolist():
        p = int(tree.parent[u])
        if labels[u] != labels[p]:
            raise InvalidLabellingError(f"black vertex {u} must carry its parent's label")
        seq = [labels[p]] + [labels[c] for c in tree.children(u)] + [labels[p]]
        if any(b - a < -1 for a, b in zip(seq, seq[1:])):
            raise InvalidLabellingError(f"label decrement below -1 around black vertex {u}")
