"""Boltzmann weights on bipartite maps and conditioned Galton-Watson trees.

A weight sequence q gives face weights q_{deg/2}.  Its generating function
g(x) = sum_k qbar_k x^k, with qbar_0 = 1 and qbar_k = C(2k-1, k-1) q_k,
drives everything: fixed points of g decide admissibility and criticality,
and the solution of x g'(x) = g(x) gives an exactly critical offspring law
whose Galton-Watson tree, once labelled and mapped, is a Boltzmann map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Union

import numpy as np
from scipy.optimize import brentq

from .rng import SeedLike, make_rng
from .sampling import enumerate_all_trees, sample_tree, vervaat_shift
from .trees import (ALL, POSITIVE, AtLeast, ChildSet, DegreeSequence, PlaneTree, membership,
                    set_contains)

__all__ = [
    "WeightSequence",
    "DivergenceError",
    "Classification",
    "CriticalitySolution",
    "TiltSolution",
    "OffspringLaw",
    "InfeasibleConditioningError",
    "Conditioning",
    "g_eval",
    "classify",
    "tilt_solve",
    "critical_law",
    "tilted_law",
    "sample_conditioned_gw",
    "boltzmann_law",
    "sample_boltzmann_map",
    "conditioned_gw_law",
    "acceptance_rate",
    "untilt_equivalence_check",
]

SERIES_RTOL = 1e-15
FIXED_POINT_CRIT_TOL = 1e-8


class DivergenceError(ValueError):
    pass


class InfeasibleConditioningError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# weight sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightSequence:
    """Face weights q_k, k >= 1.

    Either a finite table (``table``) or a named closed form.  Table values
    may be Fractions, which keeps the exhaustive checks exact.
    """

    table: Mapping[int, Union[float, Fraction]] = field(default_factory=dict)
    name: str = "table"

    def __post_init__(self):
        clean = {}
        for k, v in dict(self.table).items():
            k = int(k)
            if k < 1:
                raise ValueError("weights are indexed by k >= 1")
            if v < 0:
                raise ValueError(f"negative weight q_{k}")
            if v:
                clean[k] = v
        object.__setattr__(self, "table", dict(sorted(clean.items())))
        if self.name == "table" and not any(k >= 2 for k in clean):
            raise ValueError("need some q_k > 0 with k >= 2")

    @classmethod
    def all_ones(cls) -> "WeightSequence":
        return cls({}, "all-ones")

    @classmethod
    def quad_critical(cls) -> "WeightSequence":
        return cls({2: Fraction(1, 12)})

    @classmethod
    def from_text(cls, text: str) -> "WeightSequence":
        tab = {}
        for line in text.splitlines():
            line = line.split("#")[0].strip()
            if not line:
                continue
            k, v = line.split()
            tab[int(k)] = Fraction(v)
        return cls(tab)

    @property
    def finite(self) -> bool:
        return self.name == "table"

    @property
    def max_k(self) -> Optional[int]:
        return max(self.table) if self.finite else None

    def q(self, k: int):
        if self.finite:
            return self.table.get(k, 0)
        return 1 if k >= 1 else 0

    def qbar(self, k: int):
        if k == 0:
            return 1
        return math.comb(2 * k - 1, k - 1) * self.q(k)

    @property
    def radius(self) -> float:
        return math.inf if self.finite else 0.25

    def support(self) -> list[int]:
        return list(self.table) if self.finite else []


def g_eval(q: WeightSequence, x: float) -> tuple[float, float, float]:
    """g, g' and g'' at x."""
    x = float(x)
    if x < 0:
        raise ValueError("x must be >= 0")
    if q.name == "all-ones":
        if x >= 0.25:
            raise DivergenceError(f"x = {x} is outside the radius 1/4")
        s = 1.0 - 4.0 * x
        return 0.5 + 0.5 / math.sqrt(s), s ** -1.5, 6.0 * s ** -2.5
    terms = [(k, float(q.qbar(k))) for k in [0] + list(q.table)]
    g = math.fsum(c * x ** k for k, c in terms)
    g1 = math.fsum(k * c * x ** (k - 1) for k, c in terms if k >= 1)
    g2 = math.fsum(k * (k - 1) * c * x ** (k - 2) for k, c in terms if k >= 2)
    return g, g1, g2


def _g_series(q: WeightSequence, x: float, order: int = 0) -> float:
    """Generic series evaluation with a relative truncation rule; used to
    cross-check closed forms."""
    out, k, small = [], 0, 0
    while True:
        c = float(q.qbar(k))
        if order == 0:
            t = c * x ** k
        elif order == 1:
            t = k * c * x ** (k - 1) if k >= 1 else 0.0
        else:
            t = k * (k - 1) * c * x ** (k - 2) if k >= 2 else 0.0
        out.append(t)
        k += 1
        if q.finite and k > q.max_k:
            break
        part = math.fsum(out)
        small = small + 1 if t <= SERIES_RTOL * part else 0
        if small >= 5:
            break
        if k > 10**6:
            raise DivergenceError("series did not converge")
    return math.fsum(out)


# ---------------------------------------------------------------------------
# classification and tilting
# ---------------------------------------------------------------------------


class Classification(str, Enum):
    NO_FIXED_POINT = "no-fixed-point"
    TWO_FIXED_POINTS = "two-fixed-points"
    UNIQUE_SUBCRITICAL = "unique-subcritical"
    UNIQUE_CRITICAL = "unique-critical"


def _upper_limit(q: WeightSequence) -> float:
    return q.radius if math.isfinite(q.radius) else math.inf


def _bisect(f: Callable[[float], float], lo: float, hi: float) -> float:
    return brentq(f, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)


def _grid_bracket(f: Callable[[float], float], lim: float) -> Optional[tuple[float, float]]:
    """First sign change of f (negative to positive) on a geometric grid of (0, lim)."""
    if math.isinf(lim):
        pts = [2.0 ** e for e in range(-30, 60)]
    else:
        pts = [lim * (1 - 2.0 ** -e) for e in range(1, 52)]
        pts = [lim * 2.0 ** -e for e in range(30, 0, -1)] + pts
    prev = None
    for x in pts:
        try:
            v = f(x)
        except DivergenceError:
            break
        if v >= 0 and prev is not None and prev[1] < 0:
            return prev[0], x
        if v >= 0 and prev is None:
            return None
        prev = (x, v)
    return None


@dataclass(frozen=True)
class CriticalitySolution:
    classification: Classification
    zstar: Optional[float]
    g: Optional[float] = None
    g1: Optional[float] = None
    g2: Optional[float] = None
    tilt_x: Optional[float] = None
    q: Optional[WeightSequence] = None

    @property
    def admissible(self) -> bool:
        return self.classification != Classification.NO_FIXED_POINT

    @property
    def critical(self) -> bool:
        return self.classification == Classification.UNIQUE_CRITICAL

    @property
    def generic_critical(self) -> bool:
        return self.critical and self.g2 is not None and math.isfinite(self.g2)

    @property
    def sigma2(self) -> Optional[float]:
        if not self.critical:
            return None
        return self.zstar * self.g2

    def law(self) -> "OffspringLaw":
        return critical_law(self)

    def constant(self, S: "Conditioning") -> float:
        """C_S: 1 for edges, p(0) for vertices, p(N) for faces, p(A) for A."""
        if not self.admissible:
            raise ValueError("q is not admissible")
        z = self.zstar
        if S.kind == "E":
            return 1.0
        if S.kind == "V":
            return 1.0 / z
        if S.kind == "F":
            return 1.0 - 1.0 / z
        return critical_law(self).mass(S.A)

    def rescale(self, S: "Conditioning", n: Optional[int] = None) -> float:
        """(9/4 C_S / Sigma^2)^{1/4}, times n^{-1/4} when n is given."""
        if not self.generic_critical:
            raise ValueError("q is not generic critical")
        c = (2.25 * self.constant(S) / self.sigma2) ** 0.25
        return c if n is None else c * n ** -0.25

    def as_record(self) -> dict:
        rec = {"classification": self.classification.value, "Zstar": self.zstar,
               "tiltX": self.tilt_x, "Sigma2": self.sigma2}
        if self.admissible:
            rec["C_E"] = self.constant(Conditioning.E())
            rec["C_V"] = self.constant(Conditioning.V())
            rec["C_F"] = self.constant(Conditioning.F())
        return rec


def classify(q: WeightSequence) -> CriticalitySolution:
    """Which of the four fixed-point configurations g has on (0, R]."""
    lim = _upper_limit(q)

    def gp_minus_1(x):
        return g_eval(q, x)[1] - 1.0

    def h(x):
        return g_eval(q, x)[0] - x

    tilt = None
    try:
        tilt = tilt_solve(q).x
    except ValueError:
        pass

    br = _grid_bracket(gp_minus_1, lim)
    if br is None:
        # g' < 1 on the whole domain; g decreases relative to x
        if math.isinf(lim):
            return CriticalitySolution(Classification.NO_FIXED_POINT, None, tilt_x=tilt, q=q)
        # closed forms here diverge at R, so this branch is unreachable for them
        return CriticalitySolution(Classification.NO_FIXED_POINT, None, tilt_x=tilt, q=q)
    xm = _bisect(gp_minus_1, *br)
    hm = h(xm)
    scale = max(1.0, xm)
    if abs(hm) <= 1e-12 * scale:
        z = xm
        g, g1, g2 = g_eval(q, z)
        return CriticalitySolution(Classification.UNIQUE_CRITICAL, z, g, g1, g2, tilt, q)
    if hm > 0:
        return CriticalitySolution(Classification.NO_FIXED_POINT, None, tilt_x=tilt, q=q)
    z = _bisect(lambda x: -h(x), 0.0, xm)
    g, g1, g2 = g_eval(q, z)
    if abs(g1 - 1.0) <= FIXED_POINT_CRIT_TOL:
        return CriticalitySolution(Classification.UNIQUE_CRITICAL, z, g, g1, g2, tilt, q)
    # the second fixed point lies beyond xm; it exists iff h becomes >= 0 before R
    second = math.isinf(lim)
    if not second:
        try:
            second = h(lim * (1 - 1e-15)) >= 0
        except DivergenceError:
            second = True
    kind = Classification.TWO_FIXED_POINTS if second else Classification.UNIQUE_SUBCRITICAL
    return CriticalitySolution(kind, z, g, g1, g2, tilt, q)


@dataclass(frozen=True)
class TiltSolution:
    x: float
    g: float
    g1: float
    g2: float
    q: WeightSequence

    @property
    def constant(self) -> float:
        """g(x) / (x^2 g''(x))."""
        return self.g / (self.x ** 2 * self.g2)

    @property
    def rescale(self) -> float:
        """(9/4) g/(x^2 g''), the fourth power of the edge-count rescaling."""
        return 2.25 * self.constant

    @property
    def variance(self) -> float:
        return self.x ** 2 * self.g2 / self.g

    def law(self) -> "OffspringLaw":
        return tilted_law(self.q, self.x)


def tilt_solve(q: WeightSequence) -> TiltSolution:
    """Root of x g'(x) = g(x) on (0, R)."""
    lim = _upper_limit(q)

    def f(x):
        g, g1, _ = g_eval(q, x)
        return (x * g1 - g) / g

    br = _grid_bracket(f, lim)
    if br is None:
        raise ValueError("x g'(x) - g(x) has no sign change in (0, R)")
    x = _bisect(f, *br)
    g, g1, g2 = g_eval(q, x)
    return TiltSolution(x, g, g1, g2, q)


# ---------------------------------------------------------------------------
# offspring laws
# ---------------------------------------------------------------------------


class OffspringLaw:
    """Law on {0, 1, ...}: explicit masses on 0..K-1 plus an optional tail.

    The tail (values >= K) has total mass ``tail_mass`` and unnormalised
    masses ``tail_fn(k)``; it is only touched with tiny probability.
    """

    def __init__(self, pmf: Iterable[float], tail_fn: Optional[Callable[[int], float]] = None,
                 tail_mass: float = 0.0, name: str = ""):
        p = np.asarray(list(pmf), dtype=float)
        if (p < 0).any():
            raise ValueError("negative mass")
        self.K = p.shape[0]
        self.tail_fn = tail_fn
        self.tail_mass = float(tail_mass) if tail_fn is not None else 0.0
        tot = p.sum() + self.tail_mass
        if abs(tot - 1.0) > 1e-10:
            raise ValueError(f"law sums to {tot}")
        self.pmf = p / tot
        self.tail_mass /= tot
        self.name = name
        self._alias = None
        self._plans: dict = {}
        self._tail = None

    # moments and masses ........................................................
    def mean(self) -> float:
        k = np.arange(self.K)
        return float(math.fsum(k * self.pmf)) + self._tail_moment(1)

    def variance(self) -> float:
        k = np.arange(self.K)
        m2 = float(math.fsum(k * k * self.pmf)) + self._tail_moment(2)
        return m2 - self.mean() ** 2

    def _tail_table(self):
        """Unnormalised tail weights from K on, cut once they are negligible."""
        if self._tail is None:
            vals, k, tot = [], self.K, 0.0
            while True:
                t = self.tail_fn(k)
                vals.append(t)
                tot += t
                if t < 1e-30 * max(tot, 1e-300) or k > self.K + 10**5:
                    break
                k += 1
            w = np.array(vals)
            self._tail = (w, np.cumsum(w), tot)
        return self._tail

    def _tail_moment(self, order: int) -> float:
        if not self.tail_mass:
            return 0.0
        w, _, tot = self._tail_table()
        if not tot:
            return 0.0
        ks = np.arange(self.K, self.K + w.shape[0], dtype=float)
        return math.fsum((self.tail_mass / tot) * w * ks ** order)

    def mass(self, A: ChildSet) -> float:
        tot = math.fsum(float(self.pmf[k]) for k in range(self.K) if set_contains(A, k))
        if self.tail_mass:
            if isinstance(A, AtLeast) and A.lo <= self.K:
                tot += self.tail_mass
            elif not isinstance(A, AtLeast) and any(set_contains(A, k) for k in range(self.K, self.K + 1000)):
                raise ValueError("set A reaches into the truncated tail")
        return tot

    def __call__(self, k: int) -> float:
        if k < self.K:
            return float(self.pmf[k])
        return 0.0 if not self.tail_mass else self.tail_mass * self._tail_share(k)

    def _tail_share(self, k: int) -> float:
        return self.tail_fn(k) / self._tail_table()[2]

    # sampling .................................................................
    def _categories(self) -> np.ndarray:
        """Masses of 0..K-1 and a final tail bucket."""
        return np.append(self.pmf, self.tail_mass)

    def alias_table(self):
        if self._alias is None:
            self._alias = _vose(self._categories())
        return self._alias

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        prob, alias = self.alias_table()
        m = prob.shape[0]
        col = rng.integers(0, m, size)
        keep = rng.random(size) < prob[col]
        out = np.where(keep, col, alias[col])
        tail = np.flatnonzero(out == m - 1) if self.tail_mass else ()
        for i in tail:
            out[i] = self._sample_tail(rng)
        return out

    def _sample_tail(self, rng: np.random.Generator) -> int:
        return int(self.resolve_tail(rng, 1)[0])

    def resolve_tail(self, rng: np.random.Generator, count: int) -> np.ndarray:
        _, cum, tot = self._tail_table()
        u = rng.random(count) * tot
        idx = np.minimum(np.searchsorted(cum, u, side="right"), cum.shape[0] - 1)
        return self.K + idx.astype(np.int64)

    def __repr__(self) -> str:
        return f"OffspringLaw({self.name or 'custom'}, K={self.K}, tail={self.tail_mass:.2e})"


def _vose(p: np.ndarray):
    """Alias table (Vose)."""
    m = p.shape[0]
    scaled = p * m / p.sum()
    prob = np.zeros(m)
    alias = np.zeros(m, np.int64)
    small = [i for i in range(m) if scaled[i] < 1.0]
    large = [i for i in range(m) if scaled[i] >= 1.0]
    while small and large:
        s, l = small.pop(), large.pop()
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] = scaled[l] + scaled[s] - 1.0
        (small if scaled[l] < 1.0 else large).append(l)
    for i in large + small:
        prob[i] = 1.0
        alias[i] = i
    return prob, alias


def _law_from_terms(q: WeightSequence, x: float, scale: float, name: str) -> OffspringLaw:
    """Masses scale * x^k * qbar_k, truncated once they become negligible."""
    if q.finite:
        K = q.max_k + 1
        pmf = [scale * float(q.qbar(k)) * x ** k for k in range(K)]
        return OffspringLaw(pmf, name=name)
    pmf, k = [], 0
    while True:
        t = scale * float(q.qbar(k)) * x ** k
        pmf.append(t)
        k += 1
        if k > 8 and t < 1e-18:
            break
        if k > 10**6:
            raise DivergenceError("weights do not decay at x")

    def tail_fn(j):
        return scale * float(q.qbar(j)) * x ** j

    # geometric bound of the tail from the ratio of the last two terms
    r = pmf[-1] / pmf[-2] if pmf[-2] else 0.0
    tail_mass = pmf[-1] * r / (1 - r) if r < 1 else 0.0
    return OffspringLaw(pmf, tail_fn, tail_mass, name=name)


def critical_law(sol: CriticalitySolution) -> OffspringLaw:
    """p_q(k) = Z^{k-1} qbar_k at the smallest fixed point Z."""
    if not sol.admissible:
        raise ValueError("q is not admissible")
    return _law_from_terms(sol.q, sol.zstar, 1.0 / sol.zstar, "p_q")


def tilted_law(q: WeightSequence, x: float) -> OffspringLaw:
    """mu_q(k) = x^k qbar_k / g(x)."""
    g = g_eval(q, x)[0]
    return _law_from_terms(q, x, 1.0 / g, "mu_q")


# ---------------------------------------------------------------------------
# conditioned Galton-Watson trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Conditioning:
    """Size functional: edges+1 (E), leaves (V), internal vertices (F) or
    vertices with child count in A (FA)."""

    kind: str
    A: ChildSet = ALL

    @classmethod
    def E(cls):
        return cls("E", ALL)

    @classmethod
    def V(cls):
        return cls("V", frozenset({0}))

    @classmethod
    def F(cls):
        return cls("F", POSITIVE)

    @classmethod
    def FA(cls, A: ChildSet):
        return cls("FA", A)

    @classmethod
    def parse(cls, text: str) -> "Conditioning":
        if text in ("E", "V", "F"):
            return getattr(cls, text)()
        if text.startswith("FA:"):
            return cls.FA(frozenset(int(t) for t in text[3:].split(",") if t))
        raise ValueError(f"unknown conditioning {text!r}")

    def contains(self, k: int) -> bool:
        return set_contains(self.A, k)

    def count(self, tree: PlaneTree) -> int:
        return int(sum(1 for k in tree.kids.tolist() if self.contains(k)))


def _feasibility_hint(law: OffspringLaw, S: Conditioning, n: int) -> None:
    """Reject lattice-impossible conditionings up front (finite support only).

    With b0 a counted child count, the step sum is n (b0 - 1) plus a
    combination of k - b0 over counted k and k - 1 over uncounted k; it can
    only reach -1 if the gcd of those divides n (b0 - 1) + 1.
    """
    if law.tail_mass:
        return
    support = [k for k in range(law.K) if law.pmf[k] > 0]
    counted = [k for k in support if S.contains(k)]
    if not counted:
        raise InfeasibleConditioningError("the conditioning set has zero mass")
    b0 = counted[0]
    span = 0
    for k in counted:
        span = math.gcd(span, k - b0)
    for k in support:
        if not S.contains(k):
            span = math.gcd(span, k - 1)
    target = n * (b0 - 1) + 1
    if (target % span) if span else target:
        raise InfeasibleConditioningError(
            f"no tree with {n} counted vertices and child counts in {support}")


def sample_conditioned_gw(law: OffspringLaw, S: Conditioning, n: int, seed: SeedLike = None,
                          method: str = "counts", max_attempts: int = 10**7) -> PlaneTree:
    """GW(law) tree conditioned on exactly n vertices counted by S.

    Steps X_k = child count - 1 are drawn i.i.d. until the n-th step whose
    child count is in the conditioning set; the draw is kept iff the walk
    sits at -1 there, and is then rotated onto an excursion.

    ``method="walk"`` does exactly that.  ``method="counts"`` draws only the
    step counts (multinomial over the counted steps, negative binomial for
    the others); acceptance depends on counts alone, and given the counts the
    rotated sequence is a uniform tree with those counts, so the output law
    is the same at a fraction of the cost.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = make_rng(seed)
    _feasibility_hint(law, S, n)
    if method == "walk":
        return _gw_walk(law, S, n, rng, max_attempts)
    if method != "counts":
        raise ValueError(f"unknown method {method!r}")
    plan = _counts_plan(law, S)
    steps, pin, pout, pB = plan.steps, plan.pin, plan.pout, plan.pB
    for _ in range(max_attempts):
        c = rng.multinomial(n, pin)
        if pout is not None:
            G = rng.negative_binomial(n, pB) if pB < 1 else 0
            if G:
                c = c + rng.multinomial(G, pout)
        if law.tail_mass and c[-1]:
            extra = law.resolve_tail(rng, int(c[-1]))
            total = int(steps[:-1] @ c[:-1]) + int((extra - 1).sum())
        else:
            extra = None
            total = int(steps[:-1] @ c[:-1])
        if total != -1:
            continue
        counts = {k: int(c[k]) for k in range(1, steps.shape[0] - 1) if c[k]}
        if extra is not None:
            for v in extra.tolist():
                counts[v] = counts.get(v, 0) + 1
        return sample_tree(DegreeSequence(counts), rng)
    raise InfeasibleConditioningError(f"no acceptance in {max_attempts} attempts")


@dataclass(frozen=True)
class _CountsPlan:
    steps: np.ndarray
    pin: np.ndarray
    pout: Optional[np.ndarray]
    pB: float


def _counts_plan(law: OffspringLaw, S: Conditioning) -> _CountsPlan:
    """Category masses split by membership in the conditioning set, cached per law."""
    plan = law._plans.get(S)
    if plan is not None:
        return plan
    cats = law._categories()
    m = cats.shape[0]
    inB = np.array([S.contains(k) for k in range(m - 1)] + [False])
    if law.tail_mass:
        if isinstance(S.A, AtLeast):
            inB[-1] = S.A.lo <= law.K
            if S.A.lo > law.K:
                raise ValueError("conditioning set starts inside the truncated tail")
        elif any(S.contains(k) for k in range(law.K, law.K + 1000)):
            raise ValueError("conditioning set reaches into the truncated tail")
    pB = float(cats[inB].sum())
    if pB <= 0:
        raise InfeasibleConditioningError("the conditioning set has zero mass")
    pin = np.where(inB, cats, 0.0) / pB
    pout = np.where(~inB, cats, 0.0)
    pout = pout / pout.sum() if pout.sum() > 0 else None
    plan = _CountsPlan(np.arange(m) - 1, pin, pout, pB)
    law._plans[S] = plan
    return plan


def _gw_walk(law: OffspringLaw, S: Conditioning, n: int, rng: np.random.Generator,
             max_attempts: int) -> PlaneTree:
    for _ in range(max_attempts):
        kids = []
        hits = 0
        while hits < n:
            block = law.sample(rng, max(16, 2 * (n - hits)))
            mark = membership(block, S.A)
            cm = np.cumsum(mark)
            if cm[-1] + hits >= n:
                stop = int(np.searchsorted(cm, n - hits)) + 1
                kids.extend(block[:stop].tolist())
                hits = n
            else:
                kids.extend(block.tolist())
                hits += int(cm[-1])
        x = np.asarray(kids, np.int64) - 1
        if x.sum() != -1:
            continue
        exc, _ = vervaat_shift(x)
        return PlaneTree(exc + 1, validate=False)
    raise InfeasibleConditioningError(f"no acceptance in {max_attempts} attempts")


def acceptance_rate(law: OffspringLaw, S: Conditioning, n: int, attempts: int,
                    seed: SeedLike = None) -> float:
    """Fraction of walks accepted at size n (counts only)."""
    rng = make_rng(seed)
    cats = law._categories()
    m = cats.shape[0]
    inB = np.array([S.contains(k) for k in range(m - 1)] + [isinstance(S.A, AtLeast)])
    pB = float(cats[inB].sum())
    pin = np.where(inB, cats, 0.0) / pB
    steps = np.arange(m) - 1
    steps[-1] = law.K - 1  # tail bucket counted at its smallest value
    cB = rng.multinomial(n, pin, size=attempts)
    tot = cB @ steps
    if pB < 1:
        pout = np.where(~inB, cats, 0.0)
        pout /= pout.sum()
        G = rng.negative_binomial(n, pB, size=attempts)
        tot = tot + np.array([rng.multinomial(g, pout) @ steps for g in G.tolist()])
    return float((tot == -1).mean())


def conditioned_gw_law(law_fn: Callable[[int], Fraction], S: Conditioning, n: int,
                       max_vertices: int) -> dict[PlaneTree, float]:
    """Exact conditioned law by enumerating all trees up to ``max_vertices``."""
    weights = {}
    for N in range(max_vertices):
        for t in enumerate_all_trees(N):
            if S.count(t) != n:
                continue
            w = 1
            for k in t.kids.tolist():
                w = w * law_fn(k)
                if not w:
                    break
            if w:
                weights[t] = w
    tot = sum(weights.values())
    return {t: w / tot for t, w in weights.items()}


def boltzmann_law(q: WeightSequence, S: Conditioning) -> OffspringLaw:
    """p_q when q is critical, else the tilted mu_q (edge conditioning only).

    Solved once per weight sequence and cached on it.
    """
    cache = q.__dict__.setdefault("_laws", {})
    key = "E" if S.kind == "E" else "other"
    if key not in cache:
        sol = classify(q)
        if sol.critical:
            cache["E"] = cache["other"] = critical_law(sol)
        elif S.kind == "E":
            cache["E"] = tilt_solve(q).law()
        else:
            raise ValueError(
                f"q is {sol.classification.value}; only edge conditioning can be tilted")
    return cache[key]


def sample_boltzmann_map(q: WeightSequence, S: Conditioning, n: int, seed: SeedLike = None):
    """Pointed Boltzmann map conditioned on size n.

    Edges: n - 1 edges; vertices: n + 1 vertices; faces: n faces.  The
    offspring law is p_q when q is critical, and the tilted law mu_q for the
    edge conditioning otherwise.
    """
    from .bijections import bdg_build_map, js_inverse_labelled
    from .maps import PointedSample
    from .sampling import label_tree

    rng = make_rng(seed)
    tree = sample_conditioned_gw(boltzmann_law(q, S), S, n, rng)
    if tree.n_edges == 0:
        raise InfeasibleConditioningError("conditioned tree has no edge")
    lt2 = js_inverse_labelled(label_tree(tree, rng))
    eps = 1 if rng.random() < 0.5 else -1
    return PointedSample(bdg_build_map(lt2, eps), lt2, eps)


# ---------------------------------------------------------------------------
# tilting invariance on small trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UntiltReport:
    ratios: set
    expected_ratio: Fraction
    laws_equal: bool
    n_trees: int

    @property
    def ok(self) -> bool:
        return self.ratios <= {self.expected_ratio} and self.laws_equal


def untilt_equivalence_check(w: Callable[[int], Fraction], c: Fraction = Fraction(1),
                             a: Fraction = Fraction(1), b: Fraction = Fraction(1),
                             max_edges: int = 7, n_vertices: Optional[int] = None) -> UntiltReport:
    """Exhaustive check of the two tilting identities for weights w on Z_+.

    (i) with w~_k = c^{k-1} w_k every tree weight is divided by c;
    (ii) with w^_k = a b^k w_k the laws conditioned on the number of
    vertices coincide (for every size up to max_edges+1, or just
    ``n_vertices``).
    """
    c, a, b = Fraction(c), Fraction(a), Fraction(b)
    ratios = set()
    laws_equal = True
    total = 0
    sizes = [n_vertices] if n_vertices else range(1, max_edges + 2)
    for nv in sizes:
        base, hat = {}, {}
        for t in enumerate_all_trees(nv - 1):
            total += 1
            th = Fraction(1)
            for k in t.kids.tolist():
                th *= Fraction(w(k))
            if th == 0:
                continue
            tilde = Fraction(1)
            hw = Fraction(1)
            for k in t.kids.tolist():
                tilde *= c ** (k - 1) * Fraction(w(k))
                hw *= a * b ** k * Fraction(w(k))
            ratios.add(tilde / th)
            base[t], hat[t] = th, hw
        if base:
            zb, zh = sum(base.values()), sum(hat.values())
            laws_equal &= all(base[t] / zb == hat[t] / zh for t in base)
    return UntiltReport(ratios, 1 / c, laws_equal, total)
