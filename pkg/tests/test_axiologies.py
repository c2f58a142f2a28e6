import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from popaxiology import (
    AxiologySpec,
    Family,
    NoValueFunction,
    Ordering,
    Population,
    RankStatisticsUnavailable,
    ValidationError,
    compare,
    evaluate,
    pigou_dalton,
    vv2_dominance,
)
from popaxiology.axiologies import value_difference
from popaxiology.presets import (
    DEFAULT_SIZE_FUNCTION,
    BoundedRational,
    GeometricDecay,
    Linear,
    Logistic,
    NegativeExponential,
    Power,
    Saturating,
)

A = AxiologySpec
P = Population

int_levels = st.integers(min_value=-6, max_value=12).map(F)
frac_levels = st.fractions(min_value=-6, max_value=12, max_denominator=4)
pos_levels = st.fractions(min_value=0, max_value=12, max_denominator=4)
counts = st.integers(min_value=1, max_value=5)


def pops_over(levels, max_size=4):
    return st.dictionaries(levels, counts, min_size=1, max_size=max_size).map(P)


pops = pops_over(frac_levels)
pos_pops = pops_over(pos_levels)

SIZE_FUNCTIONS = [
    DEFAULT_SIZE_FUNCTION,
    Saturating(10, 3),
    BoundedRational(2, -1),
    Power(0.5),
    Logistic(5.0),
    Linear(1, 0),
]
RANK_WEIGHTS = [BoundedRational(1, 1), BoundedRational(0.5, 3), GeometricDecay(0.7, 0.3), Linear(0, 1)]


# -- construction -------------------------------------------------------------


@pytest.mark.parametrize("kwargs", [
    dict(family="MDT", alpha=0.5), dict(family="MDT", alpha=0), dict(family="MDT"),
    dict(family="GRD", beta=1.0), dict(family="GRD", beta=0), dict(family="TU", c=1),
    dict(family="BRD", f=BoundedRational(0, 1)), dict(family="BRD", f=Power(0.5)),
    dict(family="PR", f=Linear(-1, 0)), dict(family="VV1", g=NegativeExponential(1)),
    dict(family="QAA", g=GeometricDecay(0.5)), dict(family="XYZ"), dict(family="CL"),
    dict(family="MDT", alpha="0.1"),
])
def test_invalid_specs(kwargs):
    fam = kwargs.pop("family")
    with pytest.raises(ValidationError):
        A(fam, **kwargs)


def test_defaults_are_explicit():
    a = A.vv2()
    assert a.f == Linear(1, 0) and a.g == DEFAULT_SIZE_FUNCTION
    assert A.vv1().g(1000.0) == 500.0


@pytest.mark.parametrize("a", [
    A.tu(), A.cl("5/2"), A.pr(Power(0.5)), A.au(), A.vv1(), A.vv2(NegativeExponential(1), Saturating(5, 2)),
    A.mdt(0.25), A.qaa(Logistic(2)), A.brd(BoundedRational(1, 1)), A.grd(0.9), A.cll(-1),
], ids=str)
def test_spec_round_trip(a):
    assert A.from_dict(a.to_dict()) == a


def test_spec_file_shape():
    assert A.from_dict({"family": "GRD", "params": {"beta": 0.9}}) == A.grd(0.9)
    assert A.from_dict({"family": "PR", "params": {"f": {"kind": "power", "p": 0.5}}}) == A.pr(Power(0.5))
    with pytest.raises(ValidationError):
        A.from_dict({"family": "GRD", "params": {"beta": 0.9, "gamma": 1}})
    with pytest.raises(ValidationError):
        A.from_dict({"params": {}})


# -- spec examples ------------------------------------------------------------


def test_evaluate_examples():
    assert evaluate(A.tu(), P({1: 2, 3: 1})) == 5
    assert evaluate(A.grd(0.5), P({1: 2})) == 0.75
    assert evaluate(A.mdt(0.25), P({0: 1, 2: 1})) == 1.5
    assert evaluate(A.vv1(Linear(1, 0)), P({2: 3})) == 6


@given(pops)
def test_cl_zero_is_tu(x):
    assert evaluate(A.cl(0), x) == evaluate(A.tu(), x)


def test_evaluate_errors():
    with pytest.raises(NoValueFunction):
        evaluate(A.cll(0), P({1: 1}))
    with pytest.raises(RankStatisticsUnavailable):
        evaluate(A.grd(0.5), P({1: F(1, 2)}))
    with pytest.raises(RankStatisticsUnavailable):
        evaluate(A.brd(BoundedRational(1, 1)), P({1: F(3, 2)}))


def test_compare_examples():
    assert compare(A.cll(100), P({99: 2}), P({98: 1, 1000: 1})).ordering is Ordering.BETTER
    x = P({3: 2, 150: 1})
    assert compare(A.cll(100), x, x + P({100: 1})).ordering is Ordering.EQUAL
    r = compare(A.au(), P({2: 1}), P({1: 2}))
    assert r.ordering is Ordering.BETTER and r.value_gap == 1.0
    assert compare(A.cll(0), P({1: 1}), P({1: 1})).value_gap is None


def test_vv2_dominance_examples():
    a = A.vv2()
    assert vv2_dominance(a, P({2: 3}), P({1: 3})) is Ordering.BETTER
    assert vv2_dominance(a, P({1: 3}), P({2: 3})) is Ordering.WORSE
    assert vv2_dominance(a, P({0: 1, 2: 1}), P({1: 5})) is None
    with pytest.raises(ValidationError):
        vv2_dominance(A.au(), P({2: 1}), P({1: 1}))


# -- value gap / ordering consistency ------------------------------------------

ALL_VALUED = [
    A.tu(), A.cl(2), A.pr(Power(0.5)), A.au(), A.vv1(), A.vv2(NegativeExponential(0.5)),
    A.mdt(0.3), A.qaa(Saturating(5, 2)), A.brd(BoundedRational(1, 1)), A.grd(0.8),
]


@pytest.mark.parametrize("a", ALL_VALUED, ids=str)
def test_gap_sign_matches_ordering(a, rng):
    for _ in range(200):
        x = P({rng.randint(0, 8): rng.randint(1, 3) for _ in range(rng.randint(1, 3))})
        y = P({rng.randint(0, 8): rng.randint(1, 3) for _ in range(rng.randint(1, 3))})
        r = compare(a, x, y)
        direct = evaluate(a, x) - evaluate(a, y)
        assert r.value_gap == pytest.approx(direct, rel=1e-9, abs=1e-9)
        if r.ordering is Ordering.EQUAL:
            assert abs(direct) <= 1e-8 * max(1, abs(evaluate(a, x)))
        else:
            assert math.copysign(1, r.value_gap) == r.ordering.sign
        assert compare(a, y, x).ordering is r.ordering.flip()


# -- invariants ----------------------------------------------------------------


@pytest.mark.parametrize("a", [A.tu(), A.cl(F(3, 2)), A.pr(Power(0.5)), A.pr(NegativeExponential(1.0))], ids=str)
@given(x=pos_pops, y=pos_pops, z=pops_over(pos_levels, 6))
def test_additive_families_are_separable(a, x, y, z):
    assert compare(a, x + z, y + z).ordering is compare(a, x, y).ordering


@given(pops, st.integers(min_value=2, max_value=10**6))
def test_au_replication_invariance(x, n):
    assert evaluate(A.au(), x * n) == evaluate(A.au(), x)


@pytest.mark.parametrize("g", SIZE_FUNCTIONS, ids=str)
@given(x=pops)
def test_vv1_sign_follows_average(g, x):
    v = evaluate(A.vv1(g), x)
    assert (v > 0) - (v < 0) == (x.average > 0) - (x.average < 0)


@pytest.mark.parametrize("g", SIZE_FUNCTIONS, ids=str)
@given(x=pops, y=pops)
def test_tu_and_au_agreement_forces_vv1(g, x, y):
    if compare(A.tu(), x, y).ordering is Ordering.BETTER and compare(A.au(), x, y).ordering is Ordering.BETTER:
        assert compare(A.vv1(g), x, y).ordering is Ordering.BETTER


PARETO = [
    A.pr(Power(0.5)), A.pr(Logistic(2.0)), A.mdt(0.1), A.mdt(0.49), A.qaa(Power(0.5)),
    A.qaa(NegativeExponential(0.8)), A.brd(BoundedRational(1, 1)), A.brd(GeometricDecay(0.6, 0.1)),
    A.grd(0.5), A.grd(0.95),
]


@pytest.mark.parametrize("a", PARETO, ids=str)
@given(x=pops_over(pos_levels, 5), data=st.data())
def test_pareto_single_raise(a, x, data):
    w = data.draw(st.sampled_from(x.levels))
    up = data.draw(st.fractions(min_value=F(1, 8), max_value=6, max_denominator=8))
    raised = dict(x)
    raised[w] -= 1
    if raised[w] == 0:
        del raised[w]
    raised[w + up] = raised.get(w + up, 0) + 1
    assert compare(a, P(raised), x).ordering is not Ordering.WORSE


@pytest.mark.parametrize("a", [A.mdt(0.1), A.mdt(0.45), A.qaa(Power(0.5)), A.qaa(Saturating(4, 1)),
                               A.qaa(NegativeExponential(1.5))], ids=str)
@given(x=pops_over(pos_levels, 5), data=st.data())
def test_pigou_dalton_never_worse(a, x, data):
    if len(x.levels) < 2:
        return
    lo, hi = data.draw(st.sampled_from([(p, q) for p in x.levels for q in x.levels if p < q]))
    delta = (hi - lo) / 2 * F(data.draw(st.integers(1, 8)), 8)
    assert compare(a, pigou_dalton(x, hi, lo, delta), x).ordering is not Ordering.WORSE


def grd_flip_exact(beta, n):
    b = F(beta)
    return b - b**2 - 900 * b ** (n + 2)


def grd_flip_brute(beta, n):
    b = F(beta)
    xs = sorted([F(99)] * 2 + [F(100)] * n)
    ys = sorted([F(98), F(1000)] + [F(100)] * n)
    return sum(b**k * (u - v) for k, (u, v) in enumerate(zip(xs, ys), start=1))


@pytest.mark.parametrize("beta", [0.5, 0.9, 0.99])
def test_grd_background_difference(beta):
    a = A.grd(beta)
    x, y = P({99: 2}), P({98: 1, 1000: 1})
    for n in range(1, 51):
        z = P({100: n})
        exact = grd_flip_exact(beta, n)
        assert exact == grd_flip_brute(beta, n)
        got = value_difference(a, x + z, y + z).value
        assert got == pytest.approx(float(exact), rel=1e-9)
        assert compare(a, x + z, y + z).ordering.sign == (exact > 0) - (exact < 0)


def test_grd_background_difference_becomes_positive():
    a = A.grd(0.9)
    x, y = P({99: 2}), P({98: 1, 1000: 1})
    assert compare(a, x, y).ordering is Ordering.WORSE
    assert compare(a, x + P({100: 200}), y + P({100: 200})).ordering is Ordering.BETTER


def _random_small(rng, levels, max_size=8):
    d = {}
    for _ in range(rng.randint(1, max_size)):
        w = rng.choice(levels)
        d[w] = d.get(w, 0) + 1
    return P(d)


@pytest.mark.parametrize("beta", [0.3, 0.8, 0.99])
def test_grd_matches_rank_sum_oracle(beta, rng):
    levels = [F(-3), F(0), F(1, 2), F(2), F(7)]
    for _ in range(300):
        p = _random_small(rng, levels)
        xs = oracles.expand(p)
        ref = oracles.grd(xs, beta)
        scale = math.fsum(beta**k * abs(float(w)) for k, w in enumerate(xs, start=1))
        assert evaluate(A.grd(beta), p) == pytest.approx(ref, rel=1e-12, abs=1e-12 * scale)


@pytest.mark.parametrize("f", RANK_WEIGHTS, ids=str)
def test_brd_matches_rank_sum_oracle(f, rng):
    levels = [F(-3), F(0), F(1, 2), F(2), F(7)]
    for _ in range(300):
        p = _random_small(rng, levels)
        xs = oracles.expand(p)
        ref = oracles.brd(xs, f)
        scale = math.fsum(f(k) * abs(float(w)) for k, w in enumerate(xs, start=1))
        assert evaluate(A.brd(f), p) == pytest.approx(ref, rel=1e-12, abs=1e-12 * scale)


def test_grd_far_ranks_underflow_to_zero():
    # background far below the foreground pushes it to ranks where beta**k == 0
    a = A.grd(0.5)
    z = P({0: 5000})
    gap = value_difference(a, z + P({2: 1}), z + P({1: 1}))
    assert gap.ordering is Ordering.BETTER
    assert gap.value is None


@pytest.mark.parametrize("c", [F(0), F(2), F(-1, 2)])
def test_cll_is_a_total_preorder(c, rng):
    levels = [F(-1), F(0), F(1, 2), F(2), F(3)]
    a = A.cll(c)
    for _ in range(1000):
        x, y, z = (_random_small(rng, levels, 5) for _ in range(3))
        xy, yx = compare(a, x, y).ordering, compare(a, y, x).ordering
        assert yx is xy.flip()
        assert xy.sign == oracles.cll(oracles.expand(x), oracles.expand(y), c)
        yz, xz = compare(a, y, z).ordering, compare(a, x, z).ordering
        if xy is not Ordering.WORSE and yz is not Ordering.WORSE:
            assert xz is not Ordering.WORSE
        if xy is Ordering.BETTER and yz is not Ordering.WORSE:
            assert xz is Ordering.BETTER


@pytest.mark.parametrize("a", [A.vv2(), A.vv2(NegativeExponential(0.5)), A.vv2(Linear(1, -3), Saturating(8, 3)),
                               A.vv2(Logistic(2.0), Power(0.5)), A.vv1(BoundedRational(2, -1))], ids=str)
def test_vv2_dominance_never_contradicts_compare(a, seed):
    rng = random.Random(seed)
    levels = [F(k, 2) for k in range(-8, 17)]
    conclusive = 0
    for _ in range(500):
        x = P({rng.choice(levels): rng.randint(1, 20) for _ in range(rng.randint(1, 4))})
        y = P({rng.choice(levels): rng.randint(1, 20) for _ in range(rng.randint(1, 4))})
        d = vv2_dominance(a, x, y)
        if d is not None:
            conclusive += 1
            assert compare(a, x, y).ordering is d
    assert conclusive > 50


def test_family_enum_is_complete():
    assert {f.value for f in Family} == {"TU", "CL", "PR", "AU", "VV1", "VV2", "MDT", "QAA", "BRD", "GRD", "CLL"}
