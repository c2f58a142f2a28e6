"""Anonymous populations: welfare level -> (possibly fractional) head count.

Welfare levels are exact rationals so that levels built by different routes
compare equal; counts are exact too (floats are read through their decimal
repr).  Summary statistics that feed value functions are evaluated in double
precision; the exact ones (size, total, average) stay rational.
"""

from __future__ import annotations

import bisect
import math
import numbers
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Union

from .errors import PresetDomainError, RankStatisticsUnavailable, ValidationError

Number = Union[int, float, Fraction, Decimal, str]


def as_rational(value: Number, what: str = "value") -> Fraction:
    """Exact rational from an int, Fraction, decimal/rational string or float."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"{what}: booleans are not numbers")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationError(f"{what}: non-finite number {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"{what}: cannot parse {value!r} as a rational") from None
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValidationError(f"{what}: non-finite number {value!r}")
        return Fraction(value)
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, numbers.Real):
        return as_rational(float(value), what)
    raise ValidationError(f"{what}: unsupported type {type(value).__name__}")


def _normalize(q: Fraction):
    # integral counts are kept as int: cheaper arithmetic, same hashing/equality
    return q.numerator if q.denominator == 1 else q


def as_count(value: Number, what: str = "count"):
    q = as_rational(value, what)
    if q <= 0:
        raise ValidationError(f"{what} must be strictly positive, got {q}")
    return _normalize(q)


class Population(Mapping):
    """Immutable finitely-supported map from welfare level to positive count.

    Iteration is in ascending welfare order.  ``len`` is the number of distinct
    levels; the head count is :attr:`size`.
    """

    __slots__ = ("_counts", "_levels")

    def __init__(self, entries: Mapping | Iterable):
        pairs = entries.items() if isinstance(entries, Mapping) else entries
        counts: dict = {}
        for w, n in pairs:
            level = as_rational(w, "welfare level")
            n = as_count(n)
            counts[level] = _normalize(Fraction(counts.get(level, 0) + n))
        if not counts:
            raise ValidationError("a population needs at least one entry")
        self._counts = counts
        self._levels = tuple(sorted(counts))
        self._check()

    def _check(self) -> None:
        pass

    @classmethod
    def _trusted(cls, counts: dict) -> "Population":
        # internal fast path: keys are Fractions, counts positive and normalized
        obj = object.__new__(cls)
        obj._counts = counts
        obj._levels = tuple(sorted(counts))
        return obj

    @classmethod
    def single(cls, level: Number, count: Number = 1) -> "Population":
        return cls({level: count})

    def __getitem__(self, level):
        return self._counts[as_rational(level, "welfare level")]

    def __iter__(self):
        return iter(self._levels)

    def __len__(self) -> int:
        return len(self._levels)

    def __contains__(self, level) -> bool:
        try:
            return as_rational(level, "welfare level") in self._counts
        except ValidationError:
            return False

    def count(self, level) -> int | Fraction:
        return self._counts.get(as_rational(level, "welfare level"), 0)

    def pairs(self) -> list[tuple[Fraction, int | Fraction]]:
        c = self._counts
        return [(w, c[w]) for w in self._levels]

    @property
    def levels(self) -> tuple[Fraction, ...]:
        return self._levels

    @property
    def size(self) -> Fraction:
        return Fraction(sum(self._counts.values()))

    @property
    def total(self) -> Fraction:
        return Fraction(sum(w * n for w, n in self._counts.items()))

    @property
    def average(self) -> Fraction:
        return self.total / self.size

    @property
    def min_level(self) -> Fraction:
        return self._levels[0]

    @property
    def max_level(self) -> Fraction:
        return self._levels[-1]

    @property
    def is_integral(self) -> bool:
        return all(isinstance(n, int) for n in self._counts.values())

    def __eq__(self, other):
        if isinstance(other, Population):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._counts.items()))

    def __add__(self, other):
        if isinstance(other, Population):
            return add(self, other)
        return NotImplemented

    def __mul__(self, n):
        if isinstance(n, Population):
            return NotImplemented
        return scale(self, n)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        body = ", ".join(f"{_fmt(w)}: {_fmt(n)}" for w, n in self.pairs())
        return f"{type(self).__name__}({{{body}}})"


class Distribution(Population):
    """A population whose counts sum to exactly one."""

    __slots__ = ()

    def _check(self) -> None:
        if self.size != 1:
            raise ValidationError(f"distribution counts must sum to 1, got {self.size}")


def _fmt(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class PopulationSummary:
    size: Fraction
    total: Fraction
    average: Fraction


def add(x: Population, y: Population) -> Population:
    counts = dict(x._counts)
    for w, n in y._counts.items():
        counts[w] = _normalize(Fraction(counts.get(w, 0) + n))
    return Population._trusted(counts)


def scale(x: Population, n: Number) -> Population:
    factor = as_rational(n, "scale factor")
    if factor <= 0:
        raise ValidationError(f"scale factor must be positive, got {factor}")
    return Population._trusted({w: _normalize(factor * c) for w, c in x._counts.items()})


def summarize(x: Population) -> PopulationSummary:
    size, total = x.size, x.total
    return PopulationSummary(size=size, total=total, average=total / size)


def distribution(x: Population) -> Distribution:
    size = x.size
    obj = Distribution._trusted({w: _normalize(Fraction(c) / size) for w, c in x._counts.items()})
    return obj


def as_distribution(x: Population) -> Distribution:
    return x if isinstance(x, Distribution) else distribution(x)


def sorted_welfare(x: Population) -> list[tuple[Fraction, int]]:
    """Run-length encoding ``[(level, count), ...]`` of the ascending welfare sequence."""
    runs = x.pairs()
    for w, n in runs:
        if not isinstance(n, int):
            raise RankStatisticsUnavailable(
                f"rank statistics need integral counts; level {_fmt(w)} has count {_fmt(n)}"
            )
    return runs


def _weights(x: Population) -> list[tuple[float, float]]:
    size = x.size
    return [(float(w), float(Fraction(n) / size)) for w, n in x.pairs()]


def pair_sum(x: Iterable, y: Iterable) -> float:
    """sum over level pairs of x(a) y(b) |a - b|, for (level, count) iterables."""
    xs = [(float(a), float(n)) for a, n in x]
    ys = [(float(b), float(m)) for b, m in y]
    return math.fsum(n * m * abs(a - b) for a, n in xs for b, m in ys)


def mad(x: Population) -> float:
    """Mean absolute difference over ordered pairs of individuals."""
    ws = _weights(x)
    # each unordered pair of distinct levels appears twice
    return 2.0 * math.fsum(
        p * q * abs(a - b) for i, (a, p) in enumerate(ws) for b, q in ws[i + 1:]
    )


def mad_point(w: Number, d: Population) -> float:
    """Average distance between ``w`` and the levels of ``d`` (weighted by share)."""
    level = float(as_rational(w, "welfare level"))
    return math.fsum(p * abs(a - level) for a, p in _weights(d))


def qam(x: Population, g) -> float:
    """Quasi-arithmetic mean ``g^-1(mean of g(welfare))``."""
    g.require_domain(float(x.min_level), float(x.max_level))
    ws = _weights(x)
    mean_g = math.fsum(p * g(a) for a, p in ws)
    try:
        return g.inverse(mean_g)
    except PresetDomainError:
        raise
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise PresetDomainError(f"{g} is not invertible at {mean_g!r}: {exc}") from None


def pigou_dalton(x: Population, from_level: Number, to_level: Number, delta: Number) -> Population:
    """Move one donor at ``from_level`` down by ``delta`` and one recipient up by ``delta``."""
    src = as_rational(from_level, "from")
    dst = as_rational(to_level, "to")
    d = as_rational(delta, "delta")
    if d <= 0:
        raise ValidationError("transfer size must be positive")
    if not src > dst:
        raise ValidationError("donor level must exceed recipient level")
    for level, role in ((src, "donor"), (dst, "recipient")):
        if x.count(level) < 1:
            raise ValidationError(f"no {role} available at level {_fmt(level)}")
    if src - d < dst + d:
        raise ValidationError("transfer would leave the donor worse off than the recipient")
    counts = dict(x._counts)
    for level, change in ((src, -1), (dst, -1), (src - d, 1), (dst + d, 1)):
        new = Fraction(counts.get(level, 0) + change)
        if new == 0:
            counts.pop(level, None)
        else:
            counts[level] = _normalize(new)
    return Population._trusted(counts)


def is_moderate(x: Population, d: Population) -> bool:
    return x.min_level >= d.min_level


def covers(d: Population, levels: Iterable) -> bool:
    """True iff ``d`` has a level below, above and strictly between all of ``levels``."""
    ws = sorted({as_rational(w, "welfare level") for w in levels})
    if not ws:
        raise ValidationError("cannot test coverage of an empty level set")
    ds = d.levels
    if not (ds[0] < ws[0] and ds[-1] > ws[-1]):
        return False
    for lo, hi in zip(ws, ws[1:]):
        i = bisect.bisect_right(ds, lo)
        if i == len(ds) or not ds[i] < hi:
            return False
    return True


def support(*pops: Population) -> set[Fraction]:
    out: set[Fraction] = set()
    for p in pops:
        out.update(p.levels)
    return out
