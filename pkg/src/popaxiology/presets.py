"""Closed catalogue of serializable scalar functions.

The same catalogue feeds three roles:

* welfare transforms (prioritarian weighting, the QAA mean generator, the
  VV2 average transform): strictly increasing, usually concave;
* size functions for variable-value views: increasing, concave, bounded,
  positive on sizes >= 1;
* rank weights for bounded rank discounting: positive, non-increasing,
  eventually convex, with a positive asymptote.

Every preset also provides ``delta(x, h) = f(x + h) - f(x)`` and
``inverse_delta(y, h)`` evaluated without subtracting two nearly equal
numbers; comparisons against very large background populations depend on it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import ClassVar

from scipy.special import digamma

from .errors import PresetDomainError, ValidationError

# windows shorter than this are summed term by term
_DIRECT_WINDOW = 64


class FunctionPreset:
    kind: ClassVar[str] = ""

    def __call__(self, x: float) -> float:
        raise NotImplementedError

    def derivative(self, x: float) -> float:
        raise NotImplementedError

    def inverse(self, y: float) -> float:
        raise PresetDomainError(f"{self} has no inverse")

    def delta(self, x: float, h: float) -> float:
        return self(x + h) - self(x)

    def inverse_delta(self, y: float, h: float) -> float:
        return self.inverse(y + h) - self.inverse(y)

    def require_domain(self, lo: float, hi: float) -> None:
        """Raise unless ``[lo, hi]`` lies inside the preset's domain."""

    # role predicates -------------------------------------------------
    def increasing_concave_on(self, lo: float, hi: float) -> bool:
        return False

    def strictly_increasing_on(self, lo: float, hi: float) -> bool:
        return self.increasing_concave_on(lo, hi)

    @property
    def is_welfare_transform(self) -> bool:
        return False

    @property
    def is_size_function(self) -> bool:
        return False

    @property
    def is_bounded(self) -> bool:
        return False

    @property
    def is_rank_weight(self) -> bool:
        return False

    @property
    def asymptote(self) -> float:
        raise ValidationError(f"{self} is not a rank weight")

    def excess_window(self, lo: int, hi: int) -> float:
        """sum_{k=lo+1}^{hi} (f(k) - asymptote)."""
        raise ValidationError(f"{self} is not a rank weight")

    # serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {"kind": self.kind, **asdict(self)}

    def __str__(self) -> str:
        args = ", ".join(f"{f.name}={getattr(self, f.name)!r}" for f in fields(self))
        return f"{self.kind}({args})"


def _positive(name: str, value: float) -> float:
    if not value > 0:
        raise ValidationError(f"{name} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class Linear(FunctionPreset):
    kind: ClassVar[str] = "linear"
    a: float = 1.0
    b: float = 0.0

    def __call__(self, x):
        return self.a * x + self.b

    def derivative(self, x):
        return self.a

    def inverse(self, y):
        if self.a == 0:
            raise PresetDomainError("constant function has no inverse")
        return (y - self.b) / self.a

    def delta(self, x, h):
        return self.a * h

    def inverse_delta(self, y, h):
        if self.a == 0:
            raise PresetDomainError("constant function has no inverse")
        return h / self.a

    def increasing_concave_on(self, lo, hi):
        return self.a > 0

    @property
    def is_welfare_transform(self):
        return self.a > 0

    @property
    def is_size_function(self):
        # g(n) = n is allowed (it turns VV1 into TU) even though it is unbounded
        return self.a >= 0 and self.b >= 0 and (self.a > 0 or self.b > 0)

    @property
    def is_bounded(self):
        return self.a == 0

    @property
    def is_rank_weight(self):
        return self.a == 0 and self.b > 0

    @property
    def asymptote(self):
        if not self.is_rank_weight:
            raise ValidationError(f"{self} is not a rank weight")
        return self.b

    def excess_window(self, lo, hi):
        return 0.0


@dataclass(frozen=True)
class Power(FunctionPreset):
    """x**p on non-negative welfare."""

    kind: ClassVar[str] = "power"
    p: float = 0.5

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValidationError(f"power exponent must lie in (0, 1], got {self.p}")

    def __call__(self, x):
        if x < 0:
            raise PresetDomainError(f"power preset undefined at {x}")
        return x ** self.p

    def derivative(self, x):
        if x <= 0:
            raise PresetDomainError(f"power preset not differentiable at {x}")
        return self.p * x ** (self.p - 1)

    def inverse(self, y):
        if y < 0:
            raise PresetDomainError(f"power preset not invertible at {y}")
        return y ** (1 / self.p)

    def delta(self, x, h):
        if x > 0 and h / x > -1:
            return x ** self.p * math.expm1(self.p * math.log1p(h / x))
        return self(x + h) - self(x)

    def inverse_delta(self, y, h):
        if y > 0 and h / y > -1:
            return y ** (1 / self.p) * math.expm1(math.log1p(h / y) / self.p)
        return self.inverse(y + h) - self.inverse(y)

    def require_domain(self, lo, hi):
        if lo < 0:
            raise PresetDomainError(f"power preset needs non-negative welfare, got {lo}")

    def increasing_concave_on(self, lo, hi):
        return lo >= 0

    @property
    def is_welfare_transform(self):
        return True

    @property
    def is_size_function(self):
        return True


@dataclass(frozen=True)
class NegativeExponential(FunctionPreset):
    """-exp(-rate * x): increasing and concave on the whole line."""

    kind: ClassVar[str] = "negative-exponential"
    rate: float = 1.0

    def __post_init__(self):
        _positive("rate", self.rate)

    def __call__(self, x):
        return -math.exp(-self.rate * x)

    def derivative(self, x):
        return self.rate * math.exp(-self.rate * x)

    def inverse(self, y):
        if y >= 0:
            raise PresetDomainError(f"negative-exponential not invertible at {y}")
        return -math.log(-y) / self.rate

    def delta(self, x, h):
        return -math.exp(-self.rate * x) * math.expm1(-self.rate * h)

    def inverse_delta(self, y, h):
        if y >= 0 or y + h >= 0:
            raise PresetDomainError(f"negative-exponential not invertible near {y}")
        return -math.log1p(h / y) / self.rate

    def increasing_concave_on(self, lo, hi):
        return True

    @property
    def is_welfare_transform(self):
        return True


def _sech2(u: float) -> float:
    # 1 / cosh(u)**2 without overflow for large |u|
    e = math.exp(-2 * abs(u))
    return 4 * e / (1 + e) ** 2


@dataclass(frozen=True)
class Logistic(FunctionPreset):
    """2 / (1 + exp(-x / scale)) - 1, i.e. tanh(x / (2 scale)); concave for x >= 0."""

    kind: ClassVar[str] = "logistic"
    scale: float = 1.0

    def __post_init__(self):
        _positive("scale", self.scale)

    def _u(self, x):
        return x / (2 * self.scale)

    def __call__(self, x):
        return math.tanh(self._u(x))

    def derivative(self, x):
        return _sech2(self._u(x)) / (2 * self.scale)

    def inverse(self, y):
        if not -1 < y < 1:
            raise PresetDomainError(f"logistic not invertible at {y}")
        return 2 * self.scale * math.atanh(y)

    def delta(self, x, h):
        u, v = self._u(x), self._u(h)
        tu, tv = math.tanh(u), math.tanh(v)
        return tv * _sech2(u) / (1 + tu * tv)

    def inverse_delta(self, y, h):
        if not (-1 < y < 1 and -1 < y + h < 1):
            raise PresetDomainError(f"logistic not invertible near {y}")
        return 2 * self.scale * math.atanh(h / (1 - y * (y + h)))

    def increasing_concave_on(self, lo, hi):
        return lo >= 0

    def strictly_increasing_on(self, lo, hi):
        return True

    @property
    def is_welfare_transform(self):
        return True

    @property
    def is_size_function(self):
        return True

    @property
    def is_bounded(self):
        return True


@dataclass(frozen=True)
class GeometricDecay(FunctionPreset):
    """floor + beta**x; with floor 0 this is the geometric rank weight."""

    kind: ClassVar[str] = "geometric-decay"
    beta: float = 0.9
    floor: float = 0.0

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise ValidationError(f"beta must lie in (0, 1), got {self.beta}")
        if self.floor < 0:
            raise ValidationError("floor must be non-negative")

    def __call__(self, x):
        return self.floor + self.beta ** x

    def derivative(self, x):
        return math.log(self.beta) * self.beta ** x

    @property
    def is_rank_weight(self):
        return self.floor > 0

    @property
    def asymptote(self):
        return self.floor

    def excess_window(self, lo, hi):
        if hi <= lo:
            return 0.0
        return self.beta ** (lo + 1) * -math.expm1((hi - lo) * math.log(self.beta)) / (1 - self.beta)


def _harmonic_window(lo: int, hi: int) -> float:
    """H_hi - H_lo, keeping relative accuracy when lo is large."""
    x, y = lo + 1.0, hi + 1.0
    if x < 1e4:
        return float(digamma(y) - digamma(x))
    # asymptotic digamma; the neglected terms are O(x**-4)
    m = float(hi - lo)
    return (
        math.log1p(m / x)
        + m / (2 * x * y)
        + m * (x + y) / (12 * x * x * y * y)
        - m * (x + y) * (x * x + y * y) / (120 * x**4 * y**4)
    )


@dataclass(frozen=True)
class BoundedRational(FunctionPreset):
    """L + a / x.  a > 0: decreasing rank weight; a < 0: saturating size function."""

    kind: ClassVar[str] = "bounded-rational"
    L: float = 1.0
    a: float = 1.0

    def __call__(self, x):
        if x == 0:
            raise PresetDomainError("bounded-rational undefined at 0")
        return self.L + self.a / x

    def derivative(self, x):
        return -self.a / (x * x)

    def inverse(self, y):
        if y == self.L or self.a == 0:
            raise PresetDomainError(f"bounded-rational not invertible at {y}")
        return self.a / (y - self.L)

    def delta(self, x, h):
        return -self.a * h / (x * (x + h))

    def inverse_delta(self, y, h):
        return -self.a * h / ((y - self.L) * (y + h - self.L))

    def require_domain(self, lo, hi):
        if lo <= 0 and self.a < 0:
            raise PresetDomainError("bounded-rational transform needs positive welfare")

    def increasing_concave_on(self, lo, hi):
        return self.a < 0 and lo > 0

    @property
    def is_welfare_transform(self):
        return self.a < 0

    @property
    def is_size_function(self):
        return self.a < 0 and self.L + self.a > 0

    @property
    def is_bounded(self):
        return True

    @property
    def is_rank_weight(self):
        return self.L > 0 and self.a >= 0

    @property
    def asymptote(self):
        return self.L

    def excess_window(self, lo, hi):
        if hi <= lo:
            return 0.0
        if hi - lo <= _DIRECT_WINDOW:
            return math.fsum(self.a / k for k in range(lo + 1, hi + 1))
        return self.a * _harmonic_window(lo, hi)


@dataclass(frozen=True)
class Saturating(FunctionPreset):
    """cap * x / (x + half): increasing, concave, bounded by ``cap``."""

    kind: ClassVar[str] = "saturating"
    cap: float = 1000.0
    half: float = 1000.0

    def __post_init__(self):
        _positive("cap", self.cap)
        _positive("half", self.half)

    def __call__(self, x):
        return self.cap * x / (x + self.half)

    def derivative(self, x):
        return self.cap * self.half / (x + self.half) ** 2

    def inverse(self, y):
        if y >= self.cap:
            raise PresetDomainError(f"saturating not invertible at {y}")
        return self.half * y / (self.cap - y)

    def delta(self, x, h):
        return self.cap * self.half * h / ((x + self.half) * (x + h + self.half))

    def inverse_delta(self, y, h):
        return self.half * self.cap * h / ((self.cap - y) * (self.cap - y - h))

    def require_domain(self, lo, hi):
        if lo <= -self.half:
            raise PresetDomainError("saturating preset needs x > -half")

    def increasing_concave_on(self, lo, hi):
        return lo > -self.half

    @property
    def is_welfare_transform(self):
        return True

    @property
    def is_size_function(self):
        return True

    @property
    def is_bounded(self):
        return True


CATALOGUE: dict[str, type[FunctionPreset]] = {
    cls.kind: cls
    for cls in (Linear, Power, NegativeExponential, Logistic, GeometricDecay, BoundedRational, Saturating)
}

# default size function for variable-value views: 1000 n / (n + 1000)
DEFAULT_SIZE_FUNCTION = Saturating(cap=1000.0, half=1000.0)
IDENTITY = Linear(1.0, 0.0)


def preset_from_dict(data: dict) -> FunctionPreset:
    if not isinstance(data, dict) or "kind" not in data:
        raise ValidationError("function preset needs a 'kind' field")
    kind = data["kind"]
    # derived weightings live with the limit machinery
    if kind in DERIVED:
        return DERIVED[kind].from_dict(data)
    cls = CATALOGUE.get(kind)
    if cls is None:
        raise ValidationError(f"unknown function preset kind {kind!r}; known: {sorted(CATALOGUE)}")
    names = {f.name for f in fields(cls)}
    extra = set(data) - names - {"kind"}
    if extra:
        raise ValidationError(f"preset {kind!r}: unexpected field(s) {sorted(extra)}")
    kwargs = {}
    for name in names & set(data):
        value = data[name]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"preset {kind!r}: field {name!r} must be a number")
        kwargs[name] = float(value)
    return cls(**kwargs)


# filled in by modules defining derived (non-catalogue) weightings
DERIVED: dict[str, type] = {}
