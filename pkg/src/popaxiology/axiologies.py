"""Axiology families behind a single evaluate/compare interface.

Comparisons of the form ``X + Z`` vs ``Y + Z`` with a huge shared ``Z`` are the
whole point of this package, so :func:`compare` never subtracts two large
values.  It splits off the pointwise-common part of the two populations and
computes the value difference from family-specific merged expressions in which
the background enters only through its summaries.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import NoValueFunction, PresetDomainError, ValidationError
from .population import (
    Number,
    Population,
    _normalize,
    as_rational,
    mad,
    pair_sum,
    qam,
    sorted_welfare,
)
from .presets import (
    DEFAULT_SIZE_FUNCTION,
    IDENTITY,
    FunctionPreset,
    GeometricDecay,
    preset_from_dict,
)

# strict-preference tolerance (relative)
REL_TOL = 1e-9


class Family(str, enum.Enum):
    TU = "TU"
    CL = "CL"
    PR = "PR"
    AU = "AU"
    VV1 = "VV1"
    VV2 = "VV2"
    MDT = "MDT"
    QAA = "QAA"
    BRD = "BRD"
    GRD = "GRD"
    CLL = "CLL"


class Ordering(str, enum.Enum):
    BETTER = "Better"
    EQUAL = "Equal"
    WORSE = "Worse"

    @property
    def sign(self) -> int:
        return {"Better": 1, "Equal": 0, "Worse": -1}[self.value]

    @classmethod
    def from_sign(cls, s: float) -> "Ordering":
        return cls.BETTER if s > 0 else cls.WORSE if s < 0 else cls.EQUAL

    def flip(self) -> "Ordering":
        return Ordering.from_sign(-self.sign)


ADDITIVE = frozenset({Family.TU, Family.CL, Family.PR})
RANKED = frozenset({Family.BRD, Family.GRD})

# family -> (required params, optional params with defaults)
_PARAMS = {
    Family.TU: ((), {}),
    Family.CL: (("c",), {}),
    Family.PR: (("f",), {}),
    Family.AU: ((), {}),
    Family.VV1: ((), {"g": DEFAULT_SIZE_FUNCTION}),
    Family.VV2: ((), {"f": IDENTITY, "g": DEFAULT_SIZE_FUNCTION}),
    Family.MDT: (("alpha",), {}),
    Family.QAA: (("g",), {}),
    Family.BRD: (("f",), {}),
    Family.GRD: (("beta",), {}),
    Family.CLL: (("c",), {}),
}


@dataclass(frozen=True)
class AxiologySpec:
    family: Family
    c: Optional[Fraction] = None
    f: Optional[FunctionPreset] = None
    g: Optional[FunctionPreset] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None

    def __post_init__(self):
        try:
            fam = Family(self.family)
        except ValueError:
            raise ValidationError(
                f"unknown family {self.family!r}; known: {[f.value for f in Family]}"
            ) from None
        object.__setattr__(self, "family", fam)
        required, defaults = _PARAMS[fam]
        allowed = set(required) | set(defaults)
        for name in ("c", "f", "g", "alpha", "beta"):
            value = getattr(self, name)
            if value is None:
                if name in required:
                    raise ValidationError(f"{fam.value} needs parameter {name!r}")
                if name in defaults:
                    object.__setattr__(self, name, defaults[name])
            elif name not in allowed:
                raise ValidationError(f"{fam.value} takes no parameter {name!r}")
        if self.c is not None:
            object.__setattr__(self, "c", as_rational(self.c, "critical level c"))
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if v is not None:
                if isinstance(v, bool) or not isinstance(v, (int, float, Fraction)):
                    raise ValidationError(f"{name} must be a number")
                object.__setattr__(self, name, float(v))
        if fam is Family.MDT and not 0 < self.alpha < 0.5:
            raise ValidationError(f"MDT alpha must lie strictly inside (0, 1/2), got {self.alpha}")
        if fam is Family.GRD and not 0 < self.beta < 1:
            raise ValidationError(f"GRD beta must lie strictly inside (0, 1), got {self.beta}")
        for name in ("f", "g"):
            p = getattr(self, name)
            if p is not None and not isinstance(p, FunctionPreset):
                raise ValidationError(f"{name} must be a function preset")
        if fam in (Family.PR, Family.VV2) and not self.f.is_welfare_transform:
            raise ValidationError(f"{fam.value} needs a strictly increasing f, got {self.f}")
        if fam is Family.QAA and not self.g.is_welfare_transform:
            raise ValidationError(f"QAA needs a strictly increasing g, got {self.g}")
        if fam in (Family.VV1, Family.VV2) and not self.g.is_size_function:
            raise ValidationError(
                f"{fam.value} needs an increasing, concave, positive size function g, got {self.g}"
            )
        if fam is Family.BRD and not self.f.is_rank_weight:
            raise ValidationError(
                f"BRD needs a positive non-increasing rank weight with asymptote L > 0, got {self.f}"
            )

    # convenience constructors
    @classmethod
    def tu(cls):
        return cls(Family.TU)

    @classmethod
    def cl(cls, c: Number):
        return cls(Family.CL, c=c)

    @classmethod
    def pr(cls, f: FunctionPreset):
        return cls(Family.PR, f=f)

    @classmethod
    def au(cls):
        return cls(Family.AU)

    @classmethod
    def vv1(cls, g: FunctionPreset | None = None):
        return cls(Family.VV1, g=g)

    @classmethod
    def vv2(cls, f: FunctionPreset | None = None, g: FunctionPreset | None = None):
        return cls(Family.VV2, f=f, g=g)

    @classmethod
    def mdt(cls, alpha: float):
        return cls(Family.MDT, alpha=alpha)

    @classmethod
    def qaa(cls, g: FunctionPreset):
        return cls(Family.QAA, g=g)

    @classmethod
    def brd(cls, f: FunctionPreset):
        return cls(Family.BRD, f=f)

    @classmethod
    def grd(cls, beta: float):
        return cls(Family.GRD, beta=beta)

    @classmethod
    def cll(cls, c: Number):
        return cls(Family.CLL, c=c)

    @property
    def has_value_function(self) -> bool:
        return self.family is not Family.CLL

    def to_dict(self) -> dict:
        params: dict = {}
        if self.c is not None:
            params["c"] = _rational_str(self.c)
        for name in ("f", "g"):
            p = getattr(self, name)
            if p is not None:
                params[name] = p.to_dict()
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if v is not None:
                params[name] = v
        return {"family": self.family.value, "params": params}

    @classmethod
    def from_dict(cls, data: dict) -> "AxiologySpec":
        if not isinstance(data, dict) or "family" not in data:
            raise ValidationError("axiology needs a 'family' field")
        params = data.get("params") or {}
        if not isinstance(params, dict):
            raise ValidationError("axiology 'params' must be an object")
        unknown = set(params) - {"c", "f", "g", "alpha", "beta"}
        if unknown:
            raise ValidationError(f"axiology params: unknown field(s) {sorted(unknown)}")
        kwargs = dict(params)
        for name in ("f", "g"):
            if name in kwargs:
                kwargs[name] = preset_from_dict(kwargs[name])
        return cls(data["family"], **kwargs)

    def __str__(self) -> str:
        bits = []
        if self.c is not None:
            bits.append(f"c={_rational_str(self.c)}")
        for name in ("alpha", "beta", "f", "g"):
            v = getattr(self, name)
            if v is not None:
                bits.append(f"{name}={v}")
        return f"{self.family.value}({', '.join(bits)})" if bits else self.family.value


def _rational_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ComparisonResult:
    ordering: Ordering
    value_gap: Optional[float] = None

    def __str__(self):
        return self.ordering.value


# ---------------------------------------------------------------------------
# rank machinery


def _rank_terms(runs, weight_window, offset: int = 0) -> list[float]:
    """Per-run terms w * window(a, a+m) for runs starting at rank offset+a+1."""
    out = []
    a = offset
    for w, m in runs:
        out.append(float(w) * weight_window(a, a + m))
        a += m
    return out


def _geometric_window(beta: float):
    gd = GeometricDecay(beta)
    return gd.excess_window


def _split_common_ranks(xr, yr):
    """Strip the longest common rank prefix (and common suffix when sizes match).

    Returns (k0, x_tail_runs, y_tail_runs).
    """
    xr = [list(r) for r in xr]
    yr = [list(r) for r in yr]
    i = j = 0
    k0 = 0
    while i < len(xr) and j < len(yr) and xr[i][0] == yr[j][0]:
        m = min(xr[i][1], yr[j][1])
        k0 += m
        xr[i][1] -= m
        yr[j][1] -= m
        if xr[i][1] == 0:
            i += 1
        if yr[j][1] == 0:
            j += 1
    xt, yt = xr[i:], yr[j:]
    if sum(m for _, m in xt) == sum(m for _, m in yt):
        # equal sizes: the top ranks line up too
        while xt and yt and xt[-1][0] == yt[-1][0]:
            m = min(xt[-1][1], yt[-1][1])
            xt[-1][1] -= m
            yt[-1][1] -= m
            if xt[-1][1] == 0:
                xt.pop()
            if yt[-1][1] == 0:
                yt.pop()
    return k0, [tuple(r) for r in xt if r[1]], [tuple(r) for r in yt if r[1]]


# ---------------------------------------------------------------------------
# evaluation


def _require_domain(p: FunctionPreset, *pops) -> None:
    levels = [lvl for pop in pops if pop is not None for lvl in pop.levels]
    if levels:
        p.require_domain(float(min(levels)), float(max(levels)))


def evaluate(a: AxiologySpec, x: Population) -> float:
    fam = a.family
    if fam is Family.CLL:
        raise NoValueFunction("CLL is an ordering with no real-valued value function")
    if fam is Family.TU:
        return float(x.total)
    if fam is Family.CL:
        return float(x.total - a.c * x.size)
    if fam is Family.PR:
        _require_domain(a.f, x)
        return math.fsum(a.f(float(w)) * float(n) for w, n in x.pairs())
    if fam is Family.AU:
        return float(x.average)
    if fam is Family.VV1:
        return float(x.average) * a.g(float(x.size))
    if fam is Family.VV2:
        return a.f(float(x.average)) * a.g(float(x.size))
    if fam is Family.MDT:
        return float(x.total) - a.alpha * mad(x) * float(x.size)
    if fam is Family.QAA:
        return qam(x, a.g)
    runs = sorted_welfare(x)
    if fam is Family.GRD:
        return math.fsum(_rank_terms(runs, _geometric_window(a.beta)))
    # BRD: f = L + excess
    L = a.f.asymptote
    return math.fsum([float(L * x.total)] + _rank_terms(runs, a.f.excess_window))


# ---------------------------------------------------------------------------
# merged differences


@dataclass(frozen=True)
class Gap:
    """Difference V(x+z) - V(y+z) and the magnitude it should be judged against.

    ``signed`` carries the sign (it may be a rescaled copy of the difference);
    ``value`` is the actual difference, or None when it is not representable.
    """

    signed: float
    scale: float
    value: Optional[float]

    @property
    def ordering(self) -> Ordering:
        if abs(self.signed) <= REL_TOL * self.scale:
            return Ordering.EQUAL
        return Ordering.from_sign(self.signed)


def _pairs(p: Optional[Population]):
    return p.pairs() if p is not None else []


def _size(p) -> Fraction:
    return p.size if p is not None else Fraction(0)


def _total(p) -> Fraction:
    return p.total if p is not None else Fraction(0)


def _exact_gap(d: Fraction, scale: Fraction) -> Gap:
    v = float(d)
    return Gap(v, float(scale), v)


def gap_with_background(
    a: AxiologySpec, x: Optional[Population], y: Optional[Population], z: Population
) -> Gap:
    """V(x + z) - V(y + z) with either foreground possibly empty (None)."""
    fam = a.family
    if fam is Family.CLL:
        raise NoValueFunction("CLL is an ordering with no real-valued value function")
    if fam in RANKED:
        X = z if x is None else z + x
        Y = z if y is None else z + y
        return _rank_gap(a, X, Y)
    xs, ys = _pairs(x), _pairs(y)
    if fam is Family.TU:
        d = _total(x) - _total(y)
        return _exact_gap(d, sum(abs(w) * n for w, n in xs + ys))
    if fam is Family.CL:
        c = a.c
        d = sum((w - c) * n for w, n in xs) - sum((w - c) * n for w, n in ys)
        return _exact_gap(Fraction(d), sum(abs(w - c) * n for w, n in xs + ys))
    if fam is Family.PR:
        _require_domain(a.f, x, y, z)
        terms = [a.f(float(w)) * float(n) for w, n in xs] + [-a.f(float(w)) * float(n) for w, n in ys]
        d = math.fsum(terms)
        return Gap(d, math.fsum(abs(t) for t in terms), d)

    nz, nx, ny = z.size, _size(x), _size(y)
    NX, NY = nz + nx, nz + ny
    c = z.average
    if fam in (Family.AU, Family.VV1, Family.VV2):
        dx = (_total(x) - c * nx) / NX  # Avg X - c, exactly
        dy = (_total(y) - c * ny) / NY
        if fam is Family.AU:
            return _exact_gap(dx - dy, abs(dx) + abs(dy))
        f = IDENTITY if fam is Family.VV1 else a.f
        g = a.g
        ay = float(c + dy)
        df = f.delta(ay, float(dx - dy))  # f(Avg X) - f(Avg Y)
        dg = g.delta(float(NY), float(nx - ny))  # g(|X|) - g(|Y|)
        t1 = g(float(NX)) * df
        t2 = f(ay) * dg
        d = t1 + t2
        return Gap(d, abs(t1) + abs(t2), d)
    if fam is Family.MDT:
        alpha = a.alpha
        zz = mad(z) * float(nz) ** 2  # ordered-pair sum over Z
        t_tot = float(_total(x) - _total(y))
        t_zz = zz * float(Fraction(ny - nx) / (NX * NY))
        px = (2 * pair_sum(xs, z.pairs()) + pair_sum(xs, xs)) / float(NX) if xs else 0.0
        py = (2 * pair_sum(ys, z.pairs()) + pair_sum(ys, ys)) / float(NY) if ys else 0.0
        d = t_tot - alpha * math.fsum([t_zz, px, -py])
        scale = abs(t_tot) + alpha * (abs(t_zz) + px + py)
        return Gap(d, scale, d)
    if fam is Family.QAA:
        g = a.g
        _require_domain(g, x, y, z)
        G = math.fsum(g(float(w)) * float(Fraction(n) / nz) for w, n in z.pairs())
        ex = math.fsum((g(float(w)) - G) * float(n) for w, n in xs) / float(NX)
        ey = math.fsum((g(float(w)) - G) * float(n) for w, n in ys) / float(NY)
        try:
            ux = g.inverse_delta(G, ex) if xs else 0.0
            uy = g.inverse_delta(G, ey) if ys else 0.0
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise PresetDomainError(f"{g} not invertible near {G!r}: {exc}") from None
        d = ux - uy
        return Gap(d, abs(ux) + abs(uy), d)
    raise AssertionError(fam)  # pragma: no cover


def _rank_gap(a: AxiologySpec, X: Population, Y: Population) -> Gap:
    xr, yr = sorted_welfare(X), sorted_welfare(Y)
    k0, xt, yt = _split_common_ranks(xr, yr)
    if a.family is Family.GRD:
        window = _geometric_window(a.beta)
        # ranks restart at 1 after the common prefix; the true gap is beta**k0 times this
        terms = _rank_terms(xt, window) + [-t for t in _rank_terms(yt, window)]
        s = math.fsum(terms)
        scale = math.fsum(abs(t) for t in terms)
        factor = a.beta ** k0
        value = s * factor
        if value == 0.0 and s != 0.0:
            value_opt = None
        else:
            value_opt = value
        return Gap(s, scale, value_opt)
    f = a.f
    L = f.asymptote
    dtot = sum(w * m for w, m in xt) - sum(w * m for w, m in yt)
    t_l = float(L * dtot)
    ex = _rank_terms(xt, f.excess_window, k0)
    ey = _rank_terms(yt, f.excess_window, k0)
    terms = [t_l] + ex + [-t for t in ey]
    d = math.fsum(terms)
    return Gap(d, math.fsum(abs(t) for t in terms), d)


def split_common(x: Population, y: Population):
    """Pointwise minimum of the two count functions and the two remainders."""
    common, xr, yr = {}, {}, {}
    for w, n in x.pairs():
        m = y._counts.get(w)
        if m is None:
            xr[w] = n
        else:
            k = min(n, m)
            common[w] = k
            if n > k:
                xr[w] = _normalize(Fraction(n - k))
    for w, m in y.pairs():
        n = x._counts.get(w)
        if n is not None and m > n:
            yr[w] = _normalize(Fraction(m - n))
        elif n is None:
            yr[w] = m
    mk = lambda d: Population._trusted(d) if d else None
    return mk(common), mk(xr), mk(yr)


def value_difference(a: AxiologySpec, x: Population, y: Population) -> Gap:
    """V(x) - V(y), computed on merged terms when x and y overlap."""
    if a.family is Family.CLL:
        raise NoValueFunction("CLL is an ordering with no real-valued value function")
    if x == y:
        return Gap(0.0, 0.0, 0.0)
    z, fx, fy = split_common(x, y)
    if z is None:
        vx, vy = evaluate(a, x), evaluate(a, y)
        d = vx - vy
        return Gap(d, max(1.0, abs(vx), abs(vy)), d)
    if a.family in RANKED:
        return _rank_gap(a, x, y)
    return gap_with_background(a, fx, fy, z)


def compare(a: AxiologySpec, x: Population, y: Population) -> ComparisonResult:
    if a.family is Family.CLL:
        return ComparisonResult(cll_compare(a.c, x, y))
    gap = value_difference(a, x, y)
    return ComparisonResult(gap.ordering, gap.value)


def vv2_dominance(a: AxiologySpec, x: Population, y: Population) -> Optional[Ordering]:
    """Sufficient conditions under which VV2 must prefer one side; None if inconclusive."""
    if a.family not in (Family.VV2, Family.VV1):
        raise ValidationError(f"vv2_dominance needs a VV2 axiology, got {a.family.value}")
    f = IDENTITY if a.family is Family.VV1 else a.f
    ax, ay = x.average, y.average
    if ax == ay:
        return None
    if ax < ay:
        r = vv2_dominance(a, y, x)
        return r.flip() if r is not None else None
    if x.size >= y.size and f(float(ax)) >= 0:
        return Ordering.BETTER
    if y.size >= x.size and f(float(ay)) <= 0:
        return Ordering.BETTER
    return None


# ---------------------------------------------------------------------------
# critical-level leximin


def cll_compare(c: Number, x: Population, y: Population) -> Ordering:
    """Pad the smaller population at ``c``, then compare worst-off first."""
    c = as_rational(c, "critical level c")
    xr, yr = sorted_welfare(x), sorted_welfare(y)
    nx, ny = x.size, y.size
    if nx < ny:
        xr = sorted_welfare(x + Population._trusted({c: int(ny - nx)}))
    elif ny < nx:
        yr = sorted_welfare(y + Population._trusted({c: int(nx - ny)}))
    i = j = 0
    ri, rj = (xr[0][1] if xr else 0), (yr[0][1] if yr else 0)
    while i < len(xr) and j < len(yr):
        wx, wy = xr[i][0], yr[j][0]
        if wx != wy:
            return Ordering.BETTER if wx > wy else Ordering.WORSE
        m = min(ri, rj)
        ri -= m
        rj -= m
        if ri == 0:
            i += 1
            ri = xr[i][1] if i < len(xr) else 0
        if rj == 0:
            j += 1
            rj = yr[j][1] if j < len(yr) else 0
    return Ordering.EQUAL
