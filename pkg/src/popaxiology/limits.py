"""Large-background limits.

Exact thresholds for average utilitarianism, finite-n marginal values, the
numerically derived limit weighting for egalitarian views, closed-form limit
counterparts, empirical convergence scans and the repugnant-addition search.

A scan's ``stable_from`` only says that agreement held at every tested scale
from that point on. It is evidence, not a proof of the limit.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import io as _io
from .axiologies import (
    AxiologySpec,
    Family,
    Ordering,
    compare,
    gap_with_background,
)
from .errors import (
    NumericDomainError,
    RestrictionViolated,
    ThresholdUndefined,
    UncoveredCombination,
    ValidationError,
)
from .population import (
    Distribution,
    Number,
    Population,
    _normalize,
    as_distribution,
    as_rational,
    covers,
    is_moderate,
    mad,
    mad_point,
    qam,
    support,
)
from .presets import DERIVED, FunctionPreset, Linear, preset_from_dict

DEFAULT_STEPS = (1e-3, 1e-4, 1e-5, 1e-6)
CAUCHY_TOL = 1e-4


# ---------------------------------------------------------------------------
# average utilitarianism threshold


def _cl_value(x: Population, c: Fraction) -> Fraction:
    return x.total - c * x.size


def au_threshold(x: Population, y: Population, c: Number) -> float:
    """Background size above which CL_c's strict preference carries over to AU."""
    c = as_rational(c, "c")
    vx, vy = _cl_value(x, c), _cl_value(y, c)
    if vx == vy:
        raise ThresholdUndefined("CL_c is indifferent between x and y; no threshold exists")
    return float((x.size * vy - y.size * vx) / (vx - vy))


# ---------------------------------------------------------------------------
# derived weighting functions (prioritarian limits of MDT and QAA)


@dataclass(frozen=True)
class MdtLimitWeight(FunctionPreset):
    """w - 2 alpha MAD(w, D) + alpha MAD(D)."""

    kind = "mdt-limit"
    alpha: float
    D: Distribution

    def __call__(self, w):
        return w - 2 * self.alpha * mad_point(w, self.D) + self.alpha * mad(self.D)

    @property
    def is_welfare_transform(self):
        return True

    def to_dict(self):
        return {"kind": self.kind, "alpha": self.alpha, "D": _io.population_to_dict(self.D)}

    @classmethod
    def from_dict(cls, data):
        return cls(float(data["alpha"]), _io.population_from_dict(data["D"], "D", as_distribution=True))

    def __str__(self):
        return f"mdt-limit(alpha={self.alpha!r}, D={self.D!r})"


@dataclass(frozen=True)
class QaaLimitWeight(FunctionPreset):
    """g(w) - g(QAM(D)); any positive multiple gives the same ordering."""

    kind = "qaa-limit"
    g: FunctionPreset
    D: Distribution

    @property
    def anchor(self) -> float:
        return qam(self.D, self.g)

    def __call__(self, w):
        return self.g(w) - self.g(self.anchor)

    def require_domain(self, lo, hi):
        self.g.require_domain(lo, hi)

    @property
    def is_welfare_transform(self):
        return True

    def to_dict(self):
        return {"kind": self.kind, "g": self.g.to_dict(), "D": _io.population_to_dict(self.D)}

    @classmethod
    def from_dict(cls, data):
        return cls(preset_from_dict(data["g"]), _io.population_from_dict(data["D"], "D", as_distribution=True))

    def __str__(self):
        return f"qaa-limit(g={self.g}, D={self.D!r})"


DERIVED[MdtLimitWeight.kind] = MdtLimitWeight
DERIVED[QaaLimitWeight.kind] = QaaLimitWeight


def mdt_weighting(alpha: float, d: Population) -> MdtLimitWeight:
    return MdtLimitWeight(float(alpha), as_distribution(d))


def qaa_weighting(g: FunctionPreset, d: Population) -> QaaLimitWeight:
    return QaaLimitWeight(g, as_distribution(d))


def qaa_weighting_normalized(g: FunctionPreset, d: Population, w: Number) -> float:
    """(g(w) - g(QAM(D))) / g'(QAM(D)): the exact derivative of QAM at D."""
    q = qam(as_distribution(d), g)
    return (g(float(w)) - g(q)) / g.derivative(q)


def closed_form_weighting(a: AxiologySpec, d: Population, w: Number) -> float:
    """Closed-form limit weight on the same scale as :func:`numeric_weighting`."""
    if a.family is Family.MDT:
        return mdt_weighting(a.alpha, d)(float(as_rational(w)))
    if a.family is Family.QAA:
        return qaa_weighting_normalized(a.g, d, as_rational(w))
    raise ValidationError(f"no closed-form limit weighting for {a.family.value}")


# ---------------------------------------------------------------------------
# backgrounds and counterparts


@dataclass(frozen=True)
class FixedAverage:
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", as_rational(self.c, "background average"))

    def __str__(self):
        return f"fixed-average({self.c})"


@dataclass(frozen=True)
class FixedDistribution:
    D: Distribution

    def __post_init__(self):
        object.__setattr__(self, "D", as_distribution(self.D))

    def __str__(self):
        return f"fixed-distribution({self.D!r})"


Background = Union[FixedAverage, FixedDistribution]


class Restriction(str, enum.Enum):
    NONE = "none"
    MODERATE = "moderate"
    COVERED = "covered-support"


@dataclass(frozen=True)
class LimitCounterpart:
    target: AxiologySpec
    background: Background
    restriction: Restriction = Restriction.NONE

    def check(self, x: Population, y: Population) -> None:
        """Raise RestrictionViolated unless x and y meet the precondition of the convergence result."""
        if self.restriction is Restriction.MODERATE:
            d = self.background.D
            for name, p in (("x", x), ("y", y)):
                if not is_moderate(p, d):
                    raise RestrictionViolated(
                        "moderate", f"{name} reaches {p.min_level}, below the background minimum {d.min_level}"
                    )
        elif self.restriction is Restriction.COVERED:
            d = self.background.D
            if not covers(d, support(x, y)):
                raise RestrictionViolated(
                    "covered-support", "the background must have a level below, above and between all foreground levels"
                )


_AVERAGIST = (Family.AU, Family.VV1, Family.VV2)


def limit_counterpart(a: AxiologySpec, background: Background) -> LimitCounterpart:
    fam = a.family
    if fam in (Family.TU, Family.CL, Family.PR, Family.CLL):
        # separable: shared backgrounds never matter
        return LimitCounterpart(a, background)
    if fam in _AVERAGIST:
        if fam in (Family.VV1, Family.VV2) and not a.g.is_bounded:
            raise UncoveredCombination(f"{a} has an unbounded size function; no critical-level limit")
        c = background.c if isinstance(background, FixedAverage) else background.D.average
        return LimitCounterpart(AxiologySpec.cl(c), background)
    if not isinstance(background, FixedDistribution):
        raise UncoveredCombination(f"{fam.value} converges only relative to a fixed background distribution")
    D = background.D
    if fam is Family.MDT:
        return LimitCounterpart(AxiologySpec.pr(mdt_weighting(a.alpha, D)), background)
    if fam is Family.QAA:
        return LimitCounterpart(AxiologySpec.pr(qaa_weighting(a.g, D)), background)
    if fam is Family.BRD:
        return LimitCounterpart(AxiologySpec.tu(), background, Restriction.MODERATE)
    if fam is Family.GRD:
        return LimitCounterpart(AxiologySpec.cll(D.max_level), background, Restriction.COVERED)
    raise UncoveredCombination(f"no convergence result for {fam.value}")  # pragma: no cover


def background_population(background: Background, n: Number, integral: bool = True) -> Population:
    """A background of size ``n`` of the given type.

    Fixed-distribution backgrounds use exact ``n * D`` when that is integral (or
    when ``integral`` is False); otherwise counts are rounded to the nearest
    integer and the rounding residual is put at the most common level.
    """
    n = as_rational(n, "background size")
    if n <= 0:
        raise ValidationError("background size must be positive")
    if isinstance(background, FixedAverage):
        if integral and n.denominator != 1:
            raise ValidationError("rank-based families need an integral background size")
        return Population({background.c: n})
    D = background.D
    exact = {w: n * Fraction(p) for w, p in D.pairs()}
    if not integral or all(q.denominator == 1 for q in exact.values()):
        return Population._trusted({w: _normalize(q) for w, q in exact.items()})
    if n.denominator != 1:
        raise ValidationError("rank-based families need an integral background size")
    counts = {w: round(q) for w, q in exact.items()}
    mode = max(D.levels, key=lambda w: (D._counts[w], -w))
    counts[mode] += int(n) - sum(counts.values())
    counts = {w: k for w, k in counts.items() if k > 0}
    if not counts:
        raise ValidationError("background rounds to an empty population")
    return Population._trusted(counts)


def default_scales(start_exp: int = 0, stop_exp: int = 9, per_decade: int = 16) -> list[int]:
    """Geometric grid of integer sizes, ``per_decade`` points per decade."""
    out = sorted({round(10 ** (k / per_decade)) for k in range(start_exp * per_decade, stop_exp * per_decade + 1)})
    return out


# ---------------------------------------------------------------------------
# convergence scans


@dataclass(frozen=True)
class ConvergenceReport:
    scales: tuple
    agreements: tuple
    stable_from: Optional[Number]
    base_orderings: tuple = ()
    counterpart_orderings: tuple = ()
    counterpart: Optional[LimitCounterpart] = field(default=None, compare=False)

    @property
    def converged(self) -> bool:
        return self.stable_from is not None

    def rows(self):
        return list(zip(self.scales, self.counterpart_orderings, self.base_orderings, self.agreements))


def stable_from(scales: Sequence, agreements: Sequence[bool]):
    """Smallest scale from which every later tested scale agrees."""
    first = None
    for s, ok in zip(reversed(scales), reversed(agreements)):
        if not ok:
            break
        first = s
    return first


def convergence_scan(
    a: AxiologySpec,
    x: Population,
    y: Population,
    background: Background,
    scales: Optional[Sequence[Number]] = None,
    workers: int = 1,
) -> ConvergenceReport:
    lc = limit_counterpart(a, background)
    lc.check(x, y)
    scales = list(default_scales() if scales is None else scales)
    if any(s <= 0 for s in scales) or scales != sorted(scales):
        raise ValidationError("scales must be ascending positive numbers")
    integral = a.family in (Family.BRD, Family.GRD, Family.CLL)

    def one(n):
        z = background_population(background, n, integral)
        X, Y = x + z, y + z
        cp = compare(lc.target, X, Y).ordering
        base = compare(a, X, Y).ordering
        return cp, base

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, scales))
    else:
        results = [one(n) for n in scales]
    agreements = tuple(cp is Ordering.EQUAL or cp is base for cp, base in results)
    return ConvergenceReport(
        scales=tuple(scales),
        agreements=agreements,
        stable_from=stable_from(scales, agreements),
        base_orderings=tuple(b for _, b in results),
        counterpart_orderings=tuple(cp for cp, _ in results),
        counterpart=lc,
    )


# ---------------------------------------------------------------------------
# marginal values and numeric weighting


def _size_normalizer(scaling) -> FunctionPreset:
    if isinstance(scaling, FunctionPreset):
        return scaling
    names = {"1": Linear(0.0, 1.0), "constant": Linear(0.0, 1.0), "n": Linear(1.0, 0.0), "linear": Linear(1.0, 0.0)}
    try:
        return names[str(scaling)]
    except KeyError:
        raise ValidationError(f"size normalizer must be 'constant' or 'linear', got {scaling!r}") from None


def marginal_value(a: AxiologySpec, x: Population, d: Population, scaling="constant", n: Number = 10**6) -> float:
    """(V(x + nD) - V(nD)) * s(n)."""
    s = _size_normalizer(scaling)
    integral = a.family in (Family.BRD, Family.GRD)
    z = background_population(FixedDistribution(d), n, integral)
    gap = gap_with_background(a, x, None, z)
    if gap.value is None:
        raise NumericDomainError("value difference underflows at this background size")
    return gap.value * s(float(as_rational(n)))


def _quotient(a: AxiologySpec, d: Distribution, w: Fraction, t: float) -> float:
    bump = Population._trusted({w: _normalize(as_rational(t, "step"))})
    return gap_with_background(a, bump, None, d).value / t


def weighting_ladder(a: AxiologySpec, d: Population, w: Number, steps=DEFAULT_STEPS) -> list[tuple[float, float]]:
    if a.family not in (Family.MDT, Family.QAA):
        raise ValidationError(f"numeric weighting is defined for MDT and QAA, not {a.family.value}")
    d = as_distribution(d)
    w = as_rational(w, "welfare level")
    return [(t, _quotient(a, d, w, t)) for t in steps]


def numeric_weighting(a: AxiologySpec, d: Population, w: Number, t: Optional[float] = None) -> float:
    """One-sided difference quotient (V(D + t 1_w) - V(D)) / t.

    Without ``t`` the default step ladder is run. The quotient is smooth in t
    for t >= 0, so neighbouring steps are combined to cancel the O(t) error;
    successive combined values must settle (Cauchy check) and the last one is
    returned.
    """
    if t is not None:
        if not t > 0:
            raise ValidationError("step t must be positive")
        return weighting_ladder(a, d, w, (t,))[0][1]
    ladder = weighting_ladder(a, d, w)
    rs = [(t0 * q1 - t1 * q0) / (t0 - t1) for (t0, q0), (t1, q1) in zip(ladder, ladder[1:])]
    if abs(rs[-1] - rs[-2]) > CAUCHY_TOL:
        raise NumericDomainError(f"difference quotients at w={w} do not settle: {[q for _, q in ladder]}")
    return rs[-1]


def weighting_table(a: AxiologySpec, d: Population, grid: Sequence[Number]) -> list[tuple[float, float, float]]:
    return [(float(as_rational(w)), numeric_weighting(a, d, w), closed_form_weighting(a, d, w)) for w in grid]


# ---------------------------------------------------------------------------
# limit sequences used by the averagist proofs


def size_term_sequence(g: FunctionPreset, x_size: Number, sizes: Sequence[Number]) -> list[float]:
    """(g(|X+Z|) - g(|Z|)) * |Z| for each background size; tends to 0 for bounded concave g."""
    k = float(x_size)
    return [g.delta(float(n), k) * float(n) for n in sizes]


def average_term_sequence(f: FunctionPreset, c: Number, x: Population, sizes: Sequence[Number]) -> list[float]:
    """(f(Avg(X+Z)) - f(c)) * |Z| with Avg Z = c; tends to f'(c) V_CL_c(X)."""
    c = as_rational(c, "c")
    v = _cl_value(x, c)
    return [f.delta(float(c), float(v / (x.size + n))) * float(n) for n in map(as_rational, sizes)]


# ---------------------------------------------------------------------------
# repugnant addition


def repugnant_background(
    a: AxiologySpec,
    y: Population,
    epsilon: Number,
    cap: int,
    x_size: Optional[int] = None,
    z_level: Number = 0,
) -> Optional[tuple[Population, Population]]:
    """Find x (everyone at epsilon, Tot(x) > Tot(y)) and z with x + z better than y + z.

    |z| is doubled until success (or ``cap``), then bisected down to the
    smallest successful size.
    """
    if a.family not in _AVERAGIST:
        raise ValidationError(f"repugnant_background covers AU, VV1 and VV2, not {a.family.value}")
    eps = as_rational(epsilon, "epsilon")
    zl = as_rational(z_level, "z_level")
    if eps <= 0:
        raise ValidationError("epsilon must be positive")
    if y.min_level <= 0:
        raise ValidationError("every welfare level in y must be positive")
    if not eps < y.min_level:
        raise ValidationError("epsilon must lie below every welfare level in y")
    if zl > 0:
        raise ValidationError("the background must have average welfare <= 0")
    if x_size is None:
        x_size = math.ceil(y.total / eps) + 1
    x = Population({eps: x_size})
    if not x.total > y.total:
        raise ValidationError(f"x of size {x_size} does not exceed y's total welfare")

    def ok(n: int) -> bool:
        z = Population({zl: n})
        return compare(a, x + z, y + z).ordering is Ordering.BETTER

    lo, hi = 0, None  # lo: largest known failure (0 = none tested)
    n = 1
    while n <= cap:
        if ok(n):
            hi = n
            break
        lo = n
        n *= 2
    if hi is None:
        if cap > lo and ok(cap):
            hi = cap
        else:
            return None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return x, Population({zl: hi})
