from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from popaxiology import (
    Distribution,
    Population,
    RankStatisticsUnavailable,
    ValidationError,
    add,
    covers,
    distribution,
    is_moderate,
    mad,
    mad_point,
    pigou_dalton,
    qam,
    scale,
    sorted_welfare,
    summarize,
)
from popaxiology.presets import (
    BoundedRational,
    Linear,
    Logistic,
    NegativeExponential,
    Power,
    Saturating,
)

levels = st.fractions(min_value=-10, max_value=10, max_denominator=8)
counts = st.integers(min_value=1, max_value=6)
pops = st.dictionaries(levels, counts, min_size=1, max_size=5).map(Population)
scales = st.fractions(min_value=F(1, 10), max_value=50, max_denominator=10).filter(lambda q: q > 0)


# -- construction -----------------------------------------------------------


def test_levels_are_exact_rationals():
    p = Population({0.1: 1, "1/10": 2, F(1, 10): 3})
    assert p.levels == (F(1, 10),)
    assert p[F(1, 10)] == 6


def test_duplicate_levels_merge():
    assert Population([(1, 2), (1, 3)]) == Population({1: 5})


@pytest.mark.parametrize("bad", [{}, {1: 0}, {1: -1}, {float("nan"): 1}, {1: True}])
def test_rejects_invalid_entries(bad):
    with pytest.raises(ValidationError):
        Population(bad)


def test_distribution_must_sum_to_one():
    Distribution({0: F(1, 3), 1: F(2, 3)})
    with pytest.raises(ValidationError):
        Distribution({0: F(1, 3), 1: F(1, 3)})


# -- spec examples ------------------------------------------------------------


def test_add_examples():
    assert Population({1: 2}) + Population({1: 3}) == Population({1: 5})
    assert add(Population({0: 1}), Population({2: 1})) == Population({0: 1, 2: 1})
    assert (Population({1: 2}) + Population({3: 1})).total == 5


def test_scale_examples():
    assert scale(Population({1: 1, 3: 1}), 2) == Population({1: 2, 3: 2})
    d = Distribution({0: F(1, 2), 2: F(1, 2)})
    assert scale(d, 10).size == 10
    with pytest.raises(ValidationError):
        scale(d, 0)


def test_summarize_examples():
    s = summarize(Population({1: 10**10}))
    assert (s.size, s.total, s.average) == (10**10, 10**10, 1)
    s = summarize(Population({0: 1, 2: 1}))
    assert (s.size, s.total, s.average) == (2, 2, 1)
    s = summarize(Population({"0.5": 10}))
    assert (s.size, s.total, s.average) == (10, 5, F(1, 2))


def test_distribution_examples():
    assert distribution(Population({2: 4})) == Population({2: 1})
    assert distribution(Population({0: 1, 2: 1})) == Population({0: F(1, 2), 2: F(1, 2)})
    assert isinstance(distribution(Population({2: 4})), Distribution)


def test_sorted_welfare_examples():
    assert sorted_welfare(Population({2: 1, 1: 2})) == [(1, 2), (2, 1)]
    assert oracles.expand(Population({5: 3})) == [5, 5, 5]
    assert oracles.expand(Population({-1: 1, 0: 1, 3: 2})) == [-1, 0, 3, 3]
    with pytest.raises(RankStatisticsUnavailable):
        sorted_welfare(Population({1: F(1, 2)}))


def test_mad_examples():
    assert mad(Population({0: 1, 2: 1})) == 1
    assert mad(Population({7: 4})) == 0
    assert mad(Population({0: 2, 3: 1})) == pytest.approx(4 / 3, rel=1e-15)


def test_mad_point_examples():
    d = Distribution({0: F(1, 2), 2: F(1, 2)})
    assert mad_point(1, d) == 1
    assert mad_point(0, d) == 1
    assert mad_point(3, Distribution({3: 1})) == 0


def test_qam_examples():
    p = Population({0: 1, 4: 1})
    assert qam(p, Power(0.5)) == pytest.approx(1.0, rel=1e-15)
    assert qam(Population({1: 3, 5: 1}), Linear(2, 7)) == pytest.approx(2.0, rel=1e-15)
    assert qam(Population({3: 7}), NegativeExponential(1.3)) == pytest.approx(3.0, rel=1e-14)


def test_pigou_dalton_examples():
    p = Population({0: 1, 4: 1})
    assert pigou_dalton(p, 4, 0, 1) == Population({1: 1, 3: 1})
    assert pigou_dalton(p, 4, 0, 2) == Population({2: 2})
    with pytest.raises(ValidationError):
        pigou_dalton(p, 4, 0, 3)
    with pytest.raises(ValidationError):
        pigou_dalton(p, 0, 4, 1)
    with pytest.raises(ValidationError):
        pigou_dalton(p, 4, 1, 1)


def test_is_moderate_examples():
    d = Distribution({0: F(1, 2), 10: F(1, 2)})
    assert is_moderate(Population({5: 1}), d)
    assert not is_moderate(Population({-1: 1}), Distribution({0: 1}))
    assert is_moderate(Population({0: 3, 4: 1}), d)


def test_covers_examples():
    d3 = Distribution({0: F(1, 3), 2: F(1, 3), 4: F(1, 3)})
    assert covers(d3, {1, 3})
    assert not covers(Distribution({0: 1}), {1})
    assert not covers(Distribution({0: F(1, 2), 10: F(1, 2)}), {1, 2})
    with pytest.raises(ValidationError):
        covers(d3, set())


# -- properties ---------------------------------------------------------------


@given(pops, pops, pops)
def test_add_commutative_associative_and_additive(x, y, z):
    assert x + y == y + x
    assert (x + y) + z == x + (y + z)
    assert (x + y).size == x.size + y.size
    assert (x + y).total == x.total + y.total


def test_average_and_mad_are_not_additive():
    x, y = Population({0: 1}), Population({2: 1})
    assert (x + y).average != x.average + y.average
    assert mad(x + y) != mad(x) + mad(y)


@given(pops, scales)
def test_scale_invariance(x, n):
    assert distribution(scale(x, n)) == distribution(x)
    assert mad(scale(x, n)) == pytest.approx(mad(x), rel=1e-12, abs=1e-12)


@given(pops)
def test_summary_invariants(x):
    s = summarize(x)
    assert s.average == s.total / s.size
    assert x.min_level <= s.average <= x.max_level


@given(st.dictionaries(st.fractions(0, 10, max_denominator=4), counts, min_size=1, max_size=5).map(Population))
def test_qam_below_average_for_concave_presets(x):
    avg = float(x.average)
    for g in (Power(0.5), NegativeExponential(0.8), Logistic(3.0), Saturating(4.0, 2.0)):
        assert qam(x, g) <= avg + 1e-12 * max(1.0, abs(avg))
        assert qam(x, g) >= float(x.min_level) - 1e-12 * max(1.0, abs(avg))
    assert qam(x, Linear(3, -1)) == pytest.approx(avg, rel=1e-12, abs=1e-12)


def test_qam_single_level_is_identity():
    for g in (Power(0.3), NegativeExponential(2.0), Logistic(1.0), BoundedRational(1, -1), Saturating(3, 1)):
        assert qam(Population({F(7, 3): 5}), g) == pytest.approx(7 / 3, rel=1e-13)


@given(pops, st.data())
def test_pigou_dalton_preserves_total_and_never_raises_mad(x, data):
    ws = x.levels
    if len(ws) < 2:
        return
    lo, hi = sorted(data.draw(st.sampled_from([(a, b) for a in ws for b in ws if a < b])))
    delta = (hi - lo) / 2 * F(data.draw(st.integers(1, 16)), 16)
    y = pigou_dalton(x, hi, lo, delta)
    assert y.total == x.total
    assert y.size == x.size
    assert mad(y) <= mad(x) + 1e-12


@given(pops)
def test_sorted_welfare_length_matches_size(x):
    assert sum(n for _, n in sorted_welfare(x)) == x.size


def test_mad_matches_brute_force_on_small_populations(rng):
    levels = [F(-2), F(0), F(1, 3), F(2), F(7, 2)]
    for _ in range(500):
        d = {}
        for _ in range(rng.randint(1, 8)):
            w = rng.choice(levels)
            d[w] = d.get(w, 0) + 1
        p = Population(d)
        ref = float(oracles.mad_brute(oracles.expand(p)))
        assert mad(p) == pytest.approx(ref, rel=1e-12, abs=1e-15)
