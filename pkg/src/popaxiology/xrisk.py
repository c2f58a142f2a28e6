"""How much an axiology cares about avoiding an existential catastrophe.

The choice is between ``Z + C`` (catastrophe; the current generation does
better) and ``Z + C' + F`` (survival; a future population ``F`` exists).
Three measures:

* maximum incurred cost (MIC): with Avg C fixed, the largest Tot(C) - Tot(C')
  at which survival is still no worse;
* maximum opportunity cost (MOC): the same with Avg C' fixed;
* value difference ratio (VDR): gain from adding F over gain from raising
  C' to C, with Z + C' as the baseline.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from scipy.optimize import bisect

from . import io as _io
from .axiologies import AxiologySpec, Family, Gap, value_difference
from .errors import NoIndifference, NumericDomainError, PresetDomainError, ValidationError
from .population import Number, Population, as_rational

RESIDUAL_TOL = 1e-9


class RegimeWarning(UserWarning):
    """The scenario does not satisfy the size ordering a regime approximation assumes."""


@dataclass(frozen=True)
class Scenario:
    C: Population
    C_prime: Population
    F: Population
    Z: Optional[Population] = None

    def __post_init__(self):
        for name in ("C", "C_prime", "F"):
            if not isinstance(getattr(self, name), Population):
                raise ValidationError(f"scenario {name} must be a population")
        if self.Z is not None and not isinstance(self.Z, Population):
            raise ValidationError("scenario Z must be a population or empty")
        if self.C.size != self.C_prime.size:
            raise ValidationError(
                f"scenario invariant |C| = |C'| violated: {self.C.size} != {self.C_prime.size}"
            )

    @classmethod
    def single_level(
        cls,
        avg_c: Number,
        avg_c_prime: Number,
        n_c: Number,
        avg_f: Number,
        n_f: Number,
        avg_z: Number = 0,
        n_z: Number = 0,
    ) -> "Scenario":
        z = Population({avg_z: n_z}) if as_rational(n_z, "|Z|") > 0 else None
        return cls(
            C=Population({avg_c: n_c}),
            C_prime=Population({avg_c_prime: n_c}),
            F=Population({avg_f: n_f}),
            Z=z,
        )

    # summaries ----------------------------------------------------------
    @property
    def n_z(self) -> Fraction:
        return self.Z.size if self.Z is not None else Fraction(0)

    @property
    def avg_z(self) -> Optional[Fraction]:
        return self.Z.average if self.Z is not None else None

    def with_z(self, z: Optional[Population]) -> "Scenario":
        return Scenario(self.C, self.C_prime, self.F, z)

    def plus_z(self, p: Population) -> Population:
        return p if self.Z is None else self.Z + p

    # serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        pd = _io.population_to_dict
        return {
            "Z": pd(self.Z) if self.Z is not None else None,
            "C": pd(self.C),
            "C_prime": pd(self.C_prime),
            "F": pd(self.F),
        }

    @classmethod
    def from_dict(cls, data, what: str = "scenario") -> "Scenario":
        if not isinstance(data, dict):
            raise ValidationError(f"{what}: expected an object with C, C_prime, F and optional Z")
        extra = set(data) - {"Z", "C", "C_prime", "F"}
        if extra:
            raise ValidationError(f"{what}: unexpected field(s) {sorted(extra)}")
        pops = {}
        for key in ("C", "C_prime", "F"):
            if key not in data:
                raise ValidationError(f"{what}.{key}: missing")
            pops[key] = _io.population_from_dict(data[key], f"{what}.{key}")
        z = data.get("Z")
        pops["Z"] = None if z is None else _io.population_from_dict(z, f"{what}.Z")
        return cls(**pops)


@dataclass(frozen=True)
class XRiskReport:
    axiology: str
    z_size: Optional[Fraction]
    mic: float
    moc: float
    vdr: float


# ---------------------------------------------------------------------------
# closed forms


def _critical_level(a: AxiologySpec) -> Optional[Fraction]:
    if a.family is Family.TU:
        return Fraction(0)
    if a.family is Family.CL:
        return a.c
    return None


def _au_mic(s: Scenario) -> Fraction:
    nz, nc, nf = s.n_z, s.C.size, s.F.size
    af, ac = s.F.average, s.C.average
    zpart = nz * nf * (af - s.avg_z) if nz else 0
    return (zpart + nc * nf * (af - ac)) / (nz + nc)


def _au_moc(s: Scenario) -> Fraction:
    nz, nc, nf = s.n_z, s.C_prime.size, s.F.size
    af, acp = s.F.average, s.C_prime.average
    zpart = nz * nf * (af - s.avg_z) if nz else 0
    return (zpart + nc * nf * (af - acp)) / (nz + nc + nf)


def _au_vdr(s: Scenario) -> Fraction:
    nz, nc, nf = s.n_z, s.C.size, s.F.size
    af, ac, acp = s.F.average, s.C.average, s.C_prime.average
    if ac == acp:
        raise NumericDomainError("baseline is indifferent: Avg C equals Avg C'")
    nzc, nzcf = nz + nc, nz + nc + nf
    inner = af * nf * nzc / (nc * nzcf) - acp * nf / nzcf
    if nz:
        inner -= s.avg_z * nz * nf / (nc * nzcf)
    return inner / (ac - acp)


def mic(a: AxiologySpec, s: Scenario) -> float:
    """Maximum incurred cost Tot(C) - Tot(C') with Avg C held fixed."""
    c = _critical_level(a)
    if c is not None:
        return float(s.F.size * (s.F.average - c))
    if a.family is Family.AU:
        return float(_au_mic(s))
    return generic_cost_solver(a, s, "incurred")


def moc(a: AxiologySpec, s: Scenario) -> float:
    """Maximum opportunity cost Tot(C) - Tot(C') with Avg C' held fixed."""
    c = _critical_level(a)
    if c is not None:
        return float(s.F.size * (s.F.average - c))
    if a.family is Family.AU:
        return float(_au_moc(s))
    return generic_cost_solver(a, s, "opportunity")


def vdr(a: AxiologySpec, s: Scenario) -> float:
    """[V(Z+C'+F) - V(Z+C')] / [V(Z+C) - V(Z+C')]."""
    c = _critical_level(a)
    if c is not None:
        den = s.C.total - s.C_prime.total
        if den == 0:
            raise NumericDomainError("baseline is indifferent: Tot C equals Tot C'")
        return float(s.F.size * (s.F.average - c) / den)
    if a.family is Family.AU:
        return float(_au_vdr(s))
    base = s.plus_z(s.C_prime)
    num = value_difference(a, base + s.F, base)
    den = value_difference(a, s.plus_z(s.C), base)
    if den.ordering.sign == 0 or den.value is None or num.value is None:
        raise NumericDomainError(f"{a}: baseline is indifferent between Z+C and Z+C'")
    return num.value / den.value


# ---------------------------------------------------------------------------
# generic solver


def _shift(p: Population, d: Fraction) -> Population:
    return Population._trusted({w + d: n for w, n in p.pairs()})


def generic_cost_solver(a: AxiologySpec, s: Scenario, mode: str) -> float:
    """Indifference cost for any value-function axiology, by bisection.

    ``incurred``: C' is everyone in C moved down by delta; ``opportunity``: C is
    everyone in C' moved up by delta.  Returns delta * |C|.
    """
    if not a.has_value_function:
        raise ValidationError(f"{a.family.value} has no value function; cost is undefined")
    if mode not in ("incurred", "opportunity"):
        raise ValidationError(f"mode must be 'incurred' or 'opportunity', got {mode!r}")
    levels = [w for p in (s.Z, s.C, s.C_prime, s.F) if p is not None for w in p.levels]
    spread = float(max(levels) - min(levels)) or max(1.0, float(max(abs(w) for w in levels)))
    total = float(s.n_z + s.C.size + s.F.size)
    rng = spread * total / float(s.C.size)

    def gap(delta: float) -> Gap:
        d = as_rational(delta, "shift")
        if mode == "incurred":
            catastrophe, survival = s.C, _shift(s.C, -d) + s.F
        else:
            catastrophe, survival = _shift(s.C_prime, d), s.C_prime + s.F
        # positive when survival is better
        return value_difference(a, s.plus_z(survival), s.plus_z(catastrophe))

    def h(delta: float) -> float:
        return gap(delta).signed

    lo, hi = _inside_domain(h, -10 * rng), _inside_domain(h, 10 * rng)
    hlo, hhi = h(lo), h(hi)
    if hlo == 0:
        root = lo
    elif hhi == 0:
        root = hi
    elif (hlo > 0) == (hhi > 0):
        raise NoIndifference(
            f"{a}: no indifference point for a uniform shift in [{lo:.4g}, {hi:.4g}] ({mode} mode)"
        )
    else:
        root = bisect(h, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=4000)
    res = gap(root)
    if abs(res.signed) > RESIDUAL_TOL * res.scale and not _pinned(h, root):
        raise NoIndifference(f"{a}: bisection did not reach indifference (residual {res.signed:.3g})")
    return root * float(s.C.size)


def _inside_domain(h, end: float) -> float:
    """Pull a bracket end toward 0 until the shifted populations are inside the presets' domains.

    The end is then pushed back out as close to the domain boundary as bisection allows.
    """

    def ok(d):
        try:
            h(d)
            return True
        except PresetDomainError:
            return False

    if ok(end):
        return end
    bad, good = end, end / 2
    while not ok(good):
        bad, good = good, good / 2
        if abs(good) < 1e-300:
            return 0.0
    for _ in range(100):
        mid = (bad + good) / 2
        if mid in (bad, good):
            break
        if ok(mid):
            good = mid
        else:
            bad = mid
    return good


def _pinned(h, root: float, ulps: int = 8) -> bool:
    """True if h changes sign within a few ulps of root (root limited by float resolution)."""
    step = ulps * math.ulp(root) if root else 1e-300
    a, b = h(root - step), h(root + step)
    return a == 0 or b == 0 or (a > 0) != (b > 0)


# ---------------------------------------------------------------------------
# regime approximations


def _much_greater(a, b) -> bool:
    return a >= 10 * b


def regime_approx(s: Scenario, measure: str, regime: int) -> float:
    nz, nc, nf = s.n_z, s.C.size, s.F.size
    af, ac, acp = s.F.average, s.C.average, s.C_prime.average
    az = s.avg_z if s.Z is not None else Fraction(0)
    orders = {
        1: (("|F|", nf), ("|C|", nc), ("|Z|", nz)),
        2: (("|F|", nf), ("|Z|", nz), ("|C|", nc)),
        3: (("|Z|", nz), ("|F|", nf), ("|C|", nc)),
    }
    if regime not in orders:
        raise ValidationError(f"regime must be 1, 2 or 3, got {regime!r}")
    chain = orders[regime]
    for (na, va), (nb, vb) in zip(chain, chain[1:]):
        if not _much_greater(va, vb):
            warnings.warn(
                f"regime {regime} assumes {chain[0][0]} >> {chain[1][0]} >> {chain[2][0]}; "
                f"{na} >> {nb} does not hold here",
                RegimeWarning,
                stacklevel=2,
            )
    if measure == "moc":
        value = {1: nc * (af - acp), 2: nz * (af - az), 3: nf * (af - az)}[regime]
    elif measure == "vdr":
        if ac == acp:
            raise NumericDomainError("baseline is indifferent: Avg C equals Avg C'")
        value = {
            1: (af - acp) / (ac - acp),
            2: nz / nc * (af - az) / (ac - acp),
            3: nf / nc * (af - az) / (ac - acp),
        }[regime]
    else:
        raise ValidationError(f"measure must be 'moc' or 'vdr', got {measure!r}")
    return float(value)


# ---------------------------------------------------------------------------
# the standard grid


@dataclass(frozen=True)
class Table1Parameters:
    avg_f: Fraction = Fraction(2)
    n_f: Fraction = Fraction(10**17)
    avg_c: Fraction = Fraction(3, 2)
    avg_c_prime: Fraction = Fraction(1)
    n_c: Fraction = Fraction(10**10)
    avg_z: Fraction = Fraction(0)
    z_sizes: tuple = (0, 10**13, 10**20)

    def scenario(self, n_z: Number) -> Scenario:
        return Scenario.single_level(
            self.avg_c, self.avg_c_prime, self.n_c, self.avg_f, self.n_f, self.avg_z, n_z
        )


def report(a: AxiologySpec, s: Scenario, label: Optional[str] = None) -> XRiskReport:
    return XRiskReport(
        axiology=label or str(a),
        z_size=s.n_z if s.Z is not None else Fraction(0),
        mic=mic(a, s),
        moc=moc(a, s),
        vdr=vdr(a, s),
    )


def table1(params: Optional[Table1Parameters] = None) -> list[XRiskReport]:
    """AU at each background size, then the critical-level row (independent of |Z|)."""
    p = params or Table1Parameters()
    rows = [report(AxiologySpec.au(), p.scenario(nz), "AU") for nz in p.z_sizes]
    cl = report(AxiologySpec.cl(p.avg_z), p.scenario(p.z_sizes[-1]), "CL")
    rows.append(XRiskReport("CL", None, cl.mic, cl.moc, cl.vdr))
    return rows
