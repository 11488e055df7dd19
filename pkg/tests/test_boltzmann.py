import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from planarmaps.bijections import bdg_build_map, js_inverse_labelled
from planarmaps.boltzmann import (Classification, Conditioning, DivergenceError,
                                  InfeasibleConditioningError, OffspringLaw, WeightSequence,
                                  _g_series, acceptance_rate, classify, conditioned_gw_law,
                                  g_eval, sample_boltzmann_map, sample_conditioned_gw, tilt_solve,
                                  untilt_equivalence_check)
from planarmaps.maps import audit
from planarmaps.sampling import enumerate_all_trees, enumerate_labellings
from planarmaps.trees import PlaneTree

ALPHA = 1e-3
CHERRY = PlaneTree([2, 0, 0])


def q_single(k, v):
    return WeightSequence.from_text(f"{k} {v}\n")


# -- generating function ------------------------------------------------------------

def test_g_all_ones_at_tilt_point():
    g, g1, g2 = g_eval(WeightSequence.all_ones(), 3 / 16)
    assert g == pytest.approx(1.5, abs=1e-12)
    assert g1 == pytest.approx(8.0, abs=1e-10)
    assert (3 / 16) * g1 == pytest.approx(g, abs=1e-12)


def test_g_quad_polynomial():
    g, g1, g2 = g_eval(WeightSequence.quad_critical(), 2.0)
    assert (g, g1, g2) == pytest.approx((2.0, 1.0, 0.5), abs=1e-14)
    for x in (0.3, 1.1, 5.0):
        assert g_eval(WeightSequence.quad_critical(), x)[0] == pytest.approx(1 + x * x / 4)


def test_g_closed_form_matches_series_and_diverges():
    q = WeightSequence.all_ones()
    for x in (0.01, 0.1, 0.1875, 0.22):
        assert g_eval(q, x)[0] == pytest.approx(_g_series(q, x), rel=1e-12)
        assert g_eval(q, x)[0] == pytest.approx((1 + math.sqrt(1 - 4 * x)) / (2 * math.sqrt(1 - 4 * x)))
    with pytest.raises(DivergenceError):
        g_eval(q, 0.25)


def test_second_derivative_finite_difference():
    q = WeightSequence.all_ones()
    x = 3 / 16
    f = lambda y: g_eval(q, y)[0]

    def d2(h):
        return (f(x + h) - 2 * f(x) + f(x - h)) / h ** 2

    fd2 = (4 * d2(5e-5) - d2(1e-4)) / 3   # Richardson step
    g2 = g_eval(q, x)[2]
    assert g2 == pytest.approx(fd2, rel=1e-6)
    # the constant g / (x^2 g'') is 2/9, not its reciprocal
    assert f(x) / (x * x * fd2) == pytest.approx(2 / 9, rel=1e-6)


# -- classification ------------------------------------------------------------------

def test_classify_examples():
    s = classify(WeightSequence.quad_critical())
    assert s.classification == Classification.UNIQUE_CRITICAL
    assert s.zstar == pytest.approx(2.0, abs=1e-10) and s.sigma2 == pytest.approx(1.0, abs=1e-10)
    s = classify(q_single(2, 0.01))
    assert s.classification == Classification.TWO_FIXED_POINTS
    assert s.zstar == pytest.approx((1 - math.sqrt(1 - 0.12)) / 0.06, rel=1e-12)
    assert classify(q_single(2, 1)).classification == Classification.NO_FIXED_POINT
    assert classify(WeightSequence.all_ones()).classification == Classification.NO_FIXED_POINT


def test_unique_subcritical_case():
    # g(x) = 1 + 3 q x with a single fixed point beyond which g stays below x
    s = classify(WeightSequence.from_text("1 0.2\n2 0.0001\n"))
    assert s.admissible and s.classification != Classification.UNIQUE_CRITICAL


def test_tilt_examples():
    t = tilt_solve(WeightSequence.all_ones())
    assert abs(t.x - 3 / 16) <= 1e-12
    assert t.constant == pytest.approx(2 / 9, abs=1e-10)
    assert abs(t.rescale - 0.5) <= 1e-10
    t = tilt_solve(WeightSequence.quad_critical())
    assert t.x == pytest.approx(classify(WeightSequence.quad_critical()).zstar, abs=1e-9)


def test_laws_normalised_and_critical():
    sol = classify(WeightSequence.quad_critical())
    law = sol.law()
    assert law.pmf.sum() + law.tail_mass == pytest.approx(1, abs=1e-10)
    assert law.mean() == pytest.approx(sol.g1, abs=1e-10)
    assert sol.sigma2 == pytest.approx(sol.zstar * sol.g2, abs=1e-12)
    mu = tilt_solve(WeightSequence.all_ones()).law()
    assert mu.pmf.sum() + mu.tail_mass == pytest.approx(1, abs=1e-10)
    assert mu.mean() == pytest.approx(1.0, abs=1e-10)
    assert mu.variance() == pytest.approx(4.5, abs=1e-8)
    # mu(k) = x^k qbar_k / g(x) with qbar_k = binom(2k-1, k-1)
    for k in range(1, 8):
        expect = (3 / 16) ** k * math.comb(2 * k - 1, k - 1) / 1.5
        assert mu(k) == pytest.approx(expect, rel=1e-12)


def test_rescale_constants_quad():
    sol = classify(WeightSequence.quad_critical())
    assert sol.constant(Conditioning.V()) == pytest.approx(0.5)
    assert sol.rescale(Conditioning.F()) == pytest.approx((2.25 * 0.5) ** 0.25)


def test_infinite_law_sampling_mean():
    mu = tilt_solve(WeightSequence.all_ones()).law()
    rng = np.random.default_rng(0)
    x = mu.sample(rng, 400_000)
    assert x.mean() == pytest.approx(1.0, abs=0.02)
    # the tail bucket is far too light to be hit here; resolve it directly
    tail = mu.resolve_tail(rng, 20_000)
    assert (tail >= mu.K).all()
    ks = np.arange(mu.K, mu.K + 60)
    w = np.array([mu.tail_fn(int(k)) for k in ks])
    expect = float((ks * w).sum() / w.sum())
    assert tail.mean() == pytest.approx(expect, rel=0.01)


def test_alias_sampler_finite_law():
    law = OffspringLaw([0.2, 0.5, 0.0, 0.3])
    x = law.sample(np.random.default_rng(1), 200_000)
    c = np.bincount(x, minlength=4)
    assert c[2] == 0
    assert chisquare(c[[0, 1, 3]], 200_000 * np.array([0.2, 0.5, 0.3])).pvalue > ALPHA


# -- conditioned GW ---------------------------------------------------------------------

def quad_law():
    return classify(WeightSequence.quad_critical()).law()


def test_conditioned_gw_examples():
    law = quad_law()
    for s in range(30):
        assert sample_conditioned_gw(law, Conditioning.E(), 3, s) == CHERRY
        assert sample_conditioned_gw(law, Conditioning.V(), 2, s) == CHERRY


def test_conditioned_gw_internal_two():
    law = quad_law()
    support = [PlaneTree([2, 2, 0, 0, 0]), PlaneTree([2, 0, 2, 0, 0])]
    rng = np.random.default_rng(4)
    c = Counter(sample_conditioned_gw(law, Conditioning.F(), 2, rng) for _ in range(100_000))
    assert set(c) == set(support)
    assert chisquare([c[t] for t in support]).pvalue > ALPHA


def test_infeasible_edge_conditioning():
    with pytest.raises(InfeasibleConditioningError):
        sample_conditioned_gw(quad_law(), Conditioning.E(), 4, 0)
    # with child counts in {0, 2, 3}, leaves plus binary vertices is always odd
    nu = OffspringLaw([0.5, 0.0, 0.3, 0.2])
    for method in ("counts", "walk"):
        with pytest.raises(InfeasibleConditioningError):
            sample_conditioned_gw(nu, Conditioning.parse("FA:0,2"), 4, 0, method=method)


def mu_fraction(k):
    # all-ones tilted at x = 3/16, exact
    return Fraction(3, 16) ** k * math.comb(2 * k - 1, k - 1) / Fraction(3, 2) if k else Fraction(2, 3)


NO_UNARY = [Fraction(1, 2), Fraction(0), Fraction(3, 10), Fraction(1, 5)]


def no_unary_fraction(k):
    return NO_UNARY[k] if k < len(NO_UNARY) else Fraction(0)


@pytest.mark.parametrize("cond,n,method,lawname", [
    ("E", 5, "counts", "mu"), ("E", 5, "walk", "mu"),
    ("E", 6, "counts", "nu"), ("V", 4, "counts", "nu"), ("V", 4, "walk", "nu"),
    ("F", 2, "counts", "nu"), ("F", 2, "walk", "nu"), ("FA:0,2", 5, "counts", "nu"),
    ("FA:0,2", 5, "walk", "nu"),
])
def test_conditioned_gw_matches_exact_law(cond, n, method, lawname):
    """Against the exhaustively normalised conditioned law.

    ``mu`` is the tilted all-ones law (infinite support); ``nu`` has no
    unary vertices so every conditioning below bounds the tree size and the
    enumeration is complete.
    """
    S = Conditioning.parse(cond)
    if lawname == "mu":
        law, fn = tilt_solve(WeightSequence.all_ones()).law(), mu_fraction
    else:
        law, fn = OffspringLaw([float(p) for p in NO_UNARY]), no_unary_fraction
    exact = conditioned_gw_law(fn, S, n, max_vertices=9)
    support = sorted(exact, key=lambda t: t.kids.tolist())
    assert 2 <= len(support) <= 24
    draws = 100_000 if method == "counts" else 30_000
    rng = np.random.default_rng(sum(map(ord, cond + method + lawname)) + n)
    c = Counter(sample_conditioned_gw(law, S, n, rng, method=method) for _ in range(draws))
    assert set(c) <= set(exact)
    obs = np.array([c[t] for t in support])
    exp = np.array([float(exact[t]) for t in support]) * draws
    assert chisquare(obs, exp).pvalue > ALPHA


@pytest.mark.parametrize("method", ["counts", "walk"])
def test_two_internal_vertices_infinite_law(method):
    """F = 2 under mu: the root has k1 children, one of which (at position j)
    has k2 leaf children.  The weight is mu(k1) mu(k2) mu(0)^(k1+k2-1), and
    the normaliser sums k1 times that over all k1, k2 >= 1."""
    mu = tilt_solve(WeightSequence.all_ones()).law()
    pk = [float(mu(k)) for k in range(120)]
    p = pk.__getitem__
    Z = sum(k1 * p(k1) * p(k2) * p(0) ** (k1 + k2 - 1)
            for k1 in range(1, 120) for k2 in range(1, 120))
    cells = {}
    for k1 in range(1, 4):
        for j in range(k1):
            for k2 in range(1, 4):
                kids = [k1] + [0] * j + [k2] + [0] * k2 + [0] * (k1 - 1 - j)
                cells[PlaneTree(kids)] = p(k1) * p(k2) * p(0) ** (k1 + k2 - 1) / Z
    draws = 100_000 if method == "counts" else 30_000
    rng = np.random.default_rng(77 if method == "counts" else 78)
    c = Counter(sample_conditioned_gw(mu, Conditioning.F(), 2, rng, method=method)
                for _ in range(draws))
    support = list(cells)
    obs = [c[t] for t in support]
    obs.append(draws - sum(obs))
    exp = [cells[t] * draws for t in support]
    exp.append(draws - sum(exp))
    assert chisquare(obs, exp).pvalue > ALPHA


def test_acceptance_rate_slope():
    law = tilt_solve(WeightSequence.all_ones()).law()
    ns = [100, 1000, 10_000]
    rates = [acceptance_rate(law, Conditioning.E(), n, 200_000, seed=n) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(rates), 1)[0]
    assert -0.65 <= slope <= -0.35


# -- Boltzmann maps -------------------------------------------------------------------

def test_boltzmann_quadrangulation_two_faces():
    for s in range(30):
        smp = sample_boltzmann_map(WeightSequence.quad_critical(), Conditioning.F(), 2, s)
        a = audit(smp.map)
        assert a.F == 2 and a.face_degrees == {4: 2} and a.ok


def test_boltzmann_all_ones_two_edges_uniform():
    support = set()
    for t in enumerate_all_trees(2):
        for lt in enumerate_labellings(t):
            lt2 = js_inverse_labelled(lt)
            for eps in (1, -1):
                support.add(bdg_build_map(lt2, eps).canonical_key())
    support = sorted(support)
    assert len(support) == 8
    rng = np.random.default_rng(12)
    c = Counter(sample_boltzmann_map(WeightSequence.all_ones(), Conditioning.E(), 3, rng)
                .map.canonical_key() for _ in range(100_000))
    assert set(c) == set(support)
    assert chisquare([c[k] for k in support]).pvalue > ALPHA


def test_boltzmann_sizes():
    q = WeightSequence.quad_critical()
    m = sample_boltzmann_map(q, Conditioning.V(), 50, 1).map
    assert m.n_vertices == 51
    m = sample_boltzmann_map(q, Conditioning.F(), 40, 1).map
    assert m.n_faces == 40
    m = sample_boltzmann_map(WeightSequence.all_ones(), Conditioning.E(), 60, 1).map
    assert m.n_edges == 59


# -- tilting identities ---------------------------------------------------------------

def test_untilt_examples():
    w = lambda k: {0: Fraction(1), 2: Fraction(1, 12) * 3}.get(k, Fraction(0))
    rep = untilt_equivalence_check(w, c=2)
    assert rep.ratios == {Fraction(1, 2)} and rep.ok
    rep = untilt_equivalence_check(w, c=1)
    assert rep.ratios == {Fraction(1)}
    rep = untilt_equivalence_check(lambda k: Fraction(1, k + 1), a=2, b=3, n_vertices=3)
    assert rep.laws_equal and rep.n_trees == 2


def test_conditioning_parse():
    assert Conditioning.parse("E") == Conditioning.E()
    assert Conditioning.parse("FA:1,3").contains(3)
    assert not Conditioning.parse("FA:1,3").contains(2)
    with pytest.raises(ValueError):
        Conditioning.parse("Q")


def test_weights_file_parse():
    q = WeightSequence.from_text("# comment\n2 0.5\n3 0.25\n")
    assert q.q(2) == 0.5 and q.q(3) == 0.25 and q.q(1) == 0
    assert q.qbar(3) == pytest.approx(10 * 0.25)
    with pytest.raises(ValueError):
        WeightSequence.from_text("2 -1\n")
