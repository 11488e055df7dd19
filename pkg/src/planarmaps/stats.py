"""Finite-size statistics around the scaling limits of large random maps.

Nothing here estimates a limit object.  The quantities are exact identities
that hold at every size, statistics that should shrink as the size grows, and
rescaled summaries whose stability across sizes can be checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.special import kolmogorov

from .rng import SeedLike, make_rng, spawn
from .sampling import label_tree, sample_tree
from .trees import (ChildSet, DegreeSequence, PlaneTree, membership, modified_height,
                    prefix_class_counts)

__all__ = [
    "RationalPower",
    "HDiagnostics",
    "h_diagnostics",
    "angulation_law",
    "contour_height_gap",
    "two_point_identity",
    "ks_two_sample",
    "label_scaling_profile",
    "ScalingRow",
    "bridge_maxgap_dichotomy",
    "bridge_half_minima",
    "lambda_linearity",
]


@dataclass(frozen=True)
class RationalPower:
    """The number base ** exponent with both parts rational."""

    base: Fraction
    exponent: Fraction = Fraction(1, 4)

    @property
    def value(self) -> float:
        return float(self.base) ** float(self.exponent)

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        return f"({self.base})^({self.exponent})"


def angulation_law(kappa: int) -> dict[int, Fraction]:
    """Limit half-degree law for 2kappa-angulations: mass 1/kappa at kappa."""
    return {0: 1 - Fraction(1, kappa), kappa: Fraction(1, kappa)}


@dataclass(frozen=True)
class HDiagnostics:
    p_n: dict[int, Fraction]
    sigma2_n: Fraction
    max_degree_over_sqrt_n: float
    p: dict[int, Fraction]
    sigma2_p: Fraction
    tv_distance: Fraction
    sigma2_gap: Fraction
    constant_faces: RationalPower   # (9/4 (1-p(0))/sigma_p^2 / n)^{1/4}
    constant_edges: RationalPower   # (9/(4 sigma_p^2 N))^{1/4}


def h_diagnostics(ds: DegreeSequence, p: Mapping[int, Fraction]) -> HDiagnostics:
    p = {int(k): Fraction(v) for k, v in p.items() if v}
    if sum(p.values()) != 1:
        raise ValueError("reference law must sum to 1")
    mean = sum(k * v for k, v in p.items())
    sigma2_p = sum(k * k * v for k, v in p.items()) - mean * mean
    if sigma2_p == 0:
        raise ValueError("reference law has zero variance")
    pn = ds.empirical_law()
    keys = set(pn) | set(p)
    tv = sum(abs(pn.get(k, 0) - p.get(k, 0)) for k in keys) / 2
    s2n = ds.variance()
    n = ds.n_internal
    return HDiagnostics(
        p_n=pn, sigma2_n=s2n,
        max_degree_over_sqrt_n=ds.max_degree / math.sqrt(n) if n else 0.0,
        p=p, sigma2_p=sigma2_p, tv_distance=tv, sigma2_gap=abs(s2n - sigma2_p),
        constant_faces=RationalPower(Fraction(9, 4) * (1 - p.get(0, 0)) / sigma2_p / n),
        constant_edges=RationalPower(Fraction(9, 4) / sigma2_p / ds.n_edges),
    )


# ---------------------------------------------------------------------------
# tree statistics
# ---------------------------------------------------------------------------


def contour_height_gap(tree: PlaneTree) -> float:
    """max_i |Htilde(i) - ((n_0 - 1)/N) H(i)| / sqrt(N)."""
    N = tree.n_edges
    if N == 0:
        return 0.0
    n0 = int((tree.kids == 0).sum())
    gap = np.abs(modified_height(tree) * N - (n0 - 1) * tree.depth).max()
    return float(gap) / N / math.sqrt(N)


def lambda_linearity(tree_or_ds, A: ChildSet, seed: SeedLike = None) -> float:
    """max_{1 <= i <= N+1} |Lambda(i) - p_n(A) i| / N^{3/4}."""
    tree = tree_or_ds if isinstance(tree_or_ds, PlaneTree) else sample_tree(tree_or_ds, seed)
    N = tree.n_edges
    lam = prefix_class_counts(tree, A)
    hits = int(membership(tree.kids, A).sum())
    i = np.arange(lam.shape[0])
    # exact in integers: |Lambda(i)(N+1) - hits i| / (N+1)
    dev = np.abs(lam * (N + 1) - hits * i)[1:].max()
    return float(dev) / (N + 1) / N ** 0.75


# ---------------------------------------------------------------------------
# two-point function
# ---------------------------------------------------------------------------


def _last_visits(white_seq: np.ndarray) -> np.ndarray:
    """Sorted indices of the last visit of every vertex in the sequence."""
    last = np.full(int(white_seq.max()) + 1, -1, np.int64)
    np.maximum.at(last, white_seq, np.arange(white_seq.shape[0]))
    return np.sort(last[last >= 0])


def two_point_identity(ds: DegreeSequence, replicas: int, seed: SeedLike = None,
                       shift: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Samples of d(x, y) and d(star, y) for two uniform vertices x, y.

    Vertices are drawn through the last-visit enumeration of the white
    contour.  ``shift`` adds a constant to the second sample (a negative
    control for the test harness).
    """
    from .bijections import corner_vertices, white_corners
    from .maps import sample_pointed

    dxy = np.empty(replicas, np.int64)
    dsy = np.empty(replicas, np.int64)
    for r, ss in enumerate(spawn(seed, replicas)):
        rng = make_rng(ss)
        smp = sample_pointed(ds, rng)
        lt2, m = smp.tree, smp.map
        seq = white_corners(lt2.tree)          # c_0 .. c_N
        N = seq.shape[0] - 1
        g = _last_visits(seq)                   # n_0 indices in 1..N
        n0 = g.shape[0]
        ix, iy = np.ceil(n0 * (1 - rng.random(2))).astype(np.int64) - 1
        cx, cy = g[ix] % N, g[iy] % N           # corner N is corner 0
        cv = corner_vertices(m)
        lab = lt2.labels[seq[:-1]]
        dxy[r] = m.distances_from(int(cv[cx]))[cv[cy]]
        dsy[r] = lab[cy] - lab.min() + 1 + shift
    return dxy, dsy


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.

    Ties are handled by evaluating both empirical distribution functions on
    the pooled values; for discrete data the p-value is conservative.
    """
    a = np.sort(np.asarray(a, float))
    b = np.sort(np.asarray(b, float))
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    pts = np.union1d(a, b)
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    D = float(np.abs(fa - fb).max())
    en = a.size * b.size / (a.size + b.size)
    return D, float(kolmogorov(math.sqrt(en) * D))


# ---------------------------------------------------------------------------
# label scaling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalingRow:
    kappa: int
    n_faces: int
    n_edges: int
    replicas: int
    label_mean: float
    label_q10: float
    label_q50: float
    label_q90: float
    height_mean: float
    height_q50: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def label_scaling_profile(kappa: int, sizes: Sequence[int], replicas: int,
                          seed: SeedLike = None) -> list[ScalingRow]:
    """Rescaled sup |label| and sup height of uniform labelled trees.

    ``sizes`` are numbers of faces n; the tree has N = kappa n edges.  Label
    suprema are multiplied by (9/(4 sigma^2 N))^{1/4} and heights by
    (sigma^2/(4N))^{1/2}, with sigma^2 = kappa - 1.
    """
    sigma2 = kappa - 1
    rows = []
    seeds = spawn(seed, len(sizes))
    for n, ss in zip(sizes, seeds):
        ds = DegreeSequence.angulation(kappa, n)
        N = ds.n_edges
        lab = np.empty(replicas)
        hgt = np.empty(replicas)
        for r, s in enumerate(ss.spawn(replicas)):
            rng = make_rng(s)
            lt = label_tree(sample_tree(ds, rng), rng)
            lab[r] = np.abs(lt.labels).max() * (9 / (4 * sigma2 * N)) ** 0.25
            hgt[r] = lt.tree.depth.max() * math.sqrt(sigma2 / (4 * N))
        q10, q50, q90 = np.quantile(lab, [0.1, 0.5, 0.9])
        rows.append(ScalingRow(kappa, n, N, replicas, float(lab.mean()), float(q10),
                               float(q50), float(q90), float(hgt.mean()),
                               float(np.median(hgt))))
    return rows


# ---------------------------------------------------------------------------
# bridges
# ---------------------------------------------------------------------------


def _as_bridge(bridge: Sequence[int], steps: bool) -> np.ndarray:
    b = np.asarray(bridge, np.int64)
    if steps:
        b = np.concatenate(([0], np.cumsum(b)))
    if b.size < 1 or b[0] != 0 or b[-1] != 0:
        raise ValueError("not a bridge: needs b_0 = b_r = 0")
    return b


def bridge_half_minima(bridge: Sequence[int], steps: bool = False) -> tuple[int, int, int, int]:
    """The four minima over the two halves of a bridge, split at ceil(r/2).

    min_k B_k, min_k (B_c - B_{c-k}), min_k (B_{c+k} - B_c) and
    min_k (B_r - B_{r-k}) for 0 <= k <= c, with k truncated to valid indices.
    """
    b = _as_bridge(bridge, steps)
    r = b.shape[0] - 1
    c = -(-r // 2)
    k = np.arange(c + 1)
    m1 = b[: c + 1].min()
    m2 = (b[c] - b[c - k]).min()
    kk = k[c + k <= r]
    m3 = (b[c + kk] - b[c]).min()
    m4 = (b[r] - b[r - k]).min()
    return int(m1), int(m2), int(m3), int(m4)


def bridge_maxgap_dichotomy(bridge: Sequence[int], x: float, steps: bool = False) -> bool:
    """True iff max - min >= 3x forces one of the half minima to be <= -x."""
    b = _as_bridge(bridge, steps)
    if b.max() - b.min() < 3 * x:
        return True
    return min(bridge_half_minima(b)) <= -x
