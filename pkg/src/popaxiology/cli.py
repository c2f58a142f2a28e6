"""Command-line front end.

Exit status: 0 on success, 2 on invalid input, 3 when the requested quantity
does not exist for valid input (e.g. an undefined threshold).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import io as pio
from .axiologies import AxiologySpec, Ordering, compare, evaluate
from .errors import NumericDomainError, ValidationError
from .limits import (
    FixedAverage,
    FixedDistribution,
    au_threshold,
    convergence_scan,
    default_scales,
    marginal_value,
    repugnant_background,
    weighting_table,
)
from .population import as_rational, mad, qam
from .presets import preset_from_dict
from .xrisk import Table1Parameters, XRiskReport, report, table1

FORMAT_ENV = "POPAX_FORMAT"
VERBS = ("value", "compare", "mad", "qam", "threshold", "converge", "weighting",
         "marginal", "xrisk", "table1", "repugnant")


class Emitter:
    def __init__(self, fmt: str, sigfigs: int):
        self.fmt = fmt
        self.sigfigs = sigfigs

    def num(self, v) -> str:
        if v is None:
            return ""
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, Ordering):
            return v.value
        if isinstance(v, str):
            return v
        if isinstance(v, Fraction) and v.denominator == 1:
            v = v.numerator
        if isinstance(v, int) and abs(v) < 10 ** self.sigfigs:
            return str(v)
        return f"{float(v):.{self.sigfigs}g}"

    def native(self, v):
        if v is None or isinstance(v, (bool, str)):
            return v
        if isinstance(v, Ordering):
            return v.value
        if isinstance(v, Fraction) and v.denominator == 1:
            v = v.numerator
        if isinstance(v, int):
            return v
        return float(f"{float(v):.{self.sigfigs}g}")

    def table(self, header: list[str], rows: list[list]) -> str:
        if self.fmt == "json":
            out = [dict(zip(header, (self.native(v) for v in row))) for row in rows]
            return json.dumps(out, indent=2) + "\n"
        cells = [[self.num(v) for v in row] for row in rows]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(cells)
        return buf.getvalue()


def _level(text: str) -> Fraction:
    return as_rational(text, "welfare level")


def _background(args) -> FixedAverage | FixedDistribution:
    if (args.average is None) == (args.distribution is None):
        raise ValidationError("give exactly one of --average or --distribution")
    if args.average is not None:
        return FixedAverage(_level(args.average))
    return FixedDistribution(pio.load_population(args.distribution, as_distribution=True))


def _scales(args):
    if args.scales:
        return [int(s) if s.isdigit() else float(s) for s in args.scales.split(",")]
    return default_scales()


def _preset(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = pio.read_json(text)
    return preset_from_dict(data)


# ---------------------------------------------------------------------------
# verbs


def cmd_value(args, em):
    a = pio.load_axiology(args.axiology)
    p = pio.load_population(args.population)
    return em.table(["axiology", "value"], [[str(a), evaluate(a, p)]])


def cmd_compare(args, em):
    a = pio.load_axiology(args.axiology)
    x, y = pio.load_population(args.x), pio.load_population(args.y)
    r = compare(a, x, y)
    return em.table(["axiology", "ordering", "value_gap"], [[str(a), r.ordering, r.value_gap]])


def cmd_mad(args, em):
    p = pio.load_population(args.population)
    return em.table(["mad"], [[mad(p)]])


def cmd_qam(args, em):
    p = pio.load_population(args.population)
    g = _preset(args.g)
    return em.table(["qam"], [[qam(p, g)]])


def cmd_threshold(args, em):
    x, y = pio.load_population(args.x), pio.load_population(args.y)
    return em.table(["threshold"], [[au_threshold(x, y, _level(args.c))]])


def cmd_converge(args, em):
    a = pio.load_axiology(args.axiology)
    x, y = pio.load_population(args.x), pio.load_population(args.y)
    rep = convergence_scan(a, x, y, _background(args), _scales(args), workers=args.workers)
    rows = [list(r) for r in rep.rows()]
    return em.table(["scale", "counterpart_ordering", "base_ordering", "agree"], rows)


def cmd_weighting(args, em):
    a = pio.load_axiology(args.axiology)
    d = pio.load_population(args.distribution, as_distribution=True)
    if args.grid:
        grid = [_level(w) for w in args.grid.split(",")]
    else:
        lo, hi = _level(args.lo), _level(args.hi)
        n = args.points
        grid = [lo + (hi - lo) * Fraction(i, n - 1) for i in range(n)]
    rows = [list(r) for r in weighting_table(a, d, grid)]
    return em.table(["w", "f_numeric", "f_closed_form"], rows)


def cmd_marginal(args, em):
    a = pio.load_axiology(args.axiology)
    x = pio.load_population(args.x)
    d = pio.load_population(args.distribution, as_distribution=True)
    v = marginal_value(a, x, d, args.scaling, as_rational(args.n, "n"))
    return em.table(["n", "marginal_value"], [[as_rational(args.n), v]])


def _xrisk_rows(reports):
    return [[r.axiology, "---" if r.z_size is None else r.z_size, r.mic, r.moc, r.vdr] for r in reports]


XRISK_HEADER = ["Axiology", "Z_size", "MIC", "MOC", "VDR"]


def cmd_xrisk(args, em):
    s = pio.load_scenario(args.scenario)
    names = args.axiologies.split(",") if args.axiologies else ["AU"]
    reps = []
    for name in names:
        a = pio.load_axiology(name) if name.endswith(".json") else AxiologySpec(name.strip())
        reps.append(report(a, s, name if name.endswith(".json") else a.family.value))
    if not args.no_cl:
        c = s.avg_z if s.Z is not None else Fraction(0)
        cl = report(AxiologySpec.cl(c), s, "CL")
        reps.append(XRiskReport("CL", None, cl.mic, cl.moc, cl.vdr))
    return em.table(XRISK_HEADER, _xrisk_rows(reps))


def cmd_table1(args, em):
    p = Table1Parameters()
    if args.z_sizes:
        p = Table1Parameters(z_sizes=tuple(as_rational(z, "Z size") for z in args.z_sizes.split(",")))
    return em.table(XRISK_HEADER, _xrisk_rows(table1(p)))


def cmd_repugnant(args, em):
    a = pio.load_axiology(args.axiology)
    y = pio.load_population(args.y)
    found = repugnant_background(a, y, _level(args.epsilon), args.cap, args.x_size)
    if found is None:
        return em.table(["found", "x_level", "x_size", "z_level", "z_size"], [[False, None, None, None, None]])
    x, z = found
    return em.table(
        ["found", "x_level", "x_size", "z_level", "z_size"],
        [[True, x.min_level, x.size, z.min_level, z.size]],
    )


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help=f"output format (default: ${FORMAT_ENV} or csv)")
    common.add_argument("--sigfigs", type=int, default=10, help="significant digits for numbers")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    ap = argparse.ArgumentParser(prog="popax", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name, fn, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(fn=fn)
        return p

    p = verb("value", cmd_value, "value of a population under an axiology")
    p.add_argument("--axiology", required=True)
    p.add_argument("--population", required=True)

    p = verb("compare", cmd_compare, "compare two populations")
    p.add_argument("--axiology", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)

    p = verb("mad", cmd_mad, "mean absolute difference of welfare")
    p.add_argument("--population", required=True)

    p = verb("qam", cmd_qam, "quasi-arithmetic mean")
    p.add_argument("--population", required=True)
    p.add_argument("--g", required=True, help="preset as inline JSON or a JSON file")

    p = verb("threshold", cmd_threshold, "background size beyond which AU follows CL_c")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--c", default="0")

    def background_args(p):
        p.add_argument("--average", help="fixed-average background at this level")
        p.add_argument("--distribution", help="fixed-distribution background (population file)")

    p = verb("converge", cmd_converge, "scan agreement with the limit counterpart")
    p.add_argument("--axiology", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    background_args(p)
    p.add_argument("--scales", help="comma-separated background sizes (default: 16 per decade, 1..1e9)")
    p.add_argument("--workers", type=int, default=1)

    p = verb("weighting", cmd_weighting, "numeric vs closed-form limit weighting")
    p.add_argument("--axiology", required=True)
    p.add_argument("--distribution", required=True)
    p.add_argument("--grid", help="comma-separated welfare levels")
    p.add_argument("--lo", default="0")
    p.add_argument("--hi", default="10")
    p.add_argument("--points", type=int, default=50)

    p = verb("marginal", cmd_marginal, "finite-n marginal value against a background nD")
    p.add_argument("--axiology", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--distribution", required=True)
    p.add_argument("--scaling", choices=("constant", "linear"), default="constant")
    p.add_argument("--n", default="1000000")

    p = verb("xrisk", cmd_xrisk, "MIC/MOC/VDR for a scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--axiologies", help="comma-separated family names or axiology files (default AU)")
    p.add_argument("--no-cl", action="store_true", help="omit the critical-level row")

    p = verb("table1", cmd_table1, "the standard catastrophe-cost grid")
    p.add_argument("--z-sizes", help="comma-separated background sizes (default 0,1e13,1e20)")

    p = verb("repugnant", cmd_repugnant, "search for a repugnant-addition background")
    p.add_argument("--axiology", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--cap", type=int, default=10**9)
    p.add_argument("--x-size", type=int)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # reject unknown verbs before argparse (and any file access)
    first = next((a for a in argv if not a.startswith("-")), None)
    if first is not None and first not in VERBS and "-h" not in argv and "--help" not in argv:
        print(f"popax: unknown verb {first!r}; choose from {', '.join(VERBS)}", file=sys.stderr)
        return 2
    args = build_parser().parse_args(argv)
    fmt = args.format or os.environ.get(FORMAT_ENV, "csv")
    if fmt not in ("csv", "json"):
        print(f"popax: {FORMAT_ENV} must be csv or json, got {fmt!r}", file=sys.stderr)
        return 2
    if args.sigfigs < 1:
        print("popax: --sigfigs must be at least 1", file=sys.stderr)
        return 2
    em = Emitter(fmt, args.sigfigs)
    try:
        text = args.fn(args, em)
    except ValidationError as exc:
        print(f"popax: error: {exc}", file=sys.stderr)
        return 2
    except NumericDomainError as exc:
        print(f"popax: numeric domain error: {exc}", file=sys.stderr)
        return 3
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
