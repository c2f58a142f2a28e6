"""Reading and writing populations and axiology specs (JSON and CSV).

Errors always name the offending field (``entries[3].n``) and, for files, the
line it came from.
"""

from __future__ import annotations

import csv
import io as _io
import json
from fractions import Fraction
from pathlib import Path

from .errors import ValidationError
from .population import Distribution, Population, as_count, as_rational


def _num_out(q):
    """JSON-friendly exact number: int, or a rational string."""
    q = Fraction(q)
    if q.denominator == 1:
        return q.numerator
    return f"{q.numerator}/{q.denominator}"


def _level_out(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def population_to_dict(p: Population) -> dict:
    return {"entries": [{"w": _level_out(w), "n": _num_out(n)} for w, n in p.pairs()]}


def population_from_dict(data, what: str = "population", as_distribution: bool = False) -> Population:
    if not isinstance(data, dict):
        raise ValidationError(f"{what}: expected an object with an 'entries' list")
    extra = set(data) - {"entries"}
    if extra:
        raise ValidationError(f"{what}: unexpected field(s) {sorted(extra)}")
    entries = data.get("entries")
    if not isinstance(entries, list):
        raise ValidationError(f"{what}.entries: expected a list")
    pairs = []
    for i, e in enumerate(entries):
        where = f"{what}.entries[{i}]"
        if not isinstance(e, dict):
            raise ValidationError(f"{where}: expected an object with 'w' and 'n'")
        for key in ("w", "n"):
            if key not in e:
                raise ValidationError(f"{where}.{key}: missing")
        extra = set(e) - {"w", "n"}
        if extra:
            raise ValidationError(f"{where}: unexpected field(s) {sorted(extra)}")
        pairs.append((as_rational(e["w"], f"{where}.w"), as_count(e["n"], f"{where}.n")))
    if not pairs:
        raise ValidationError(f"{what}.entries: a population needs at least one entry")
    cls = Distribution if as_distribution else Population
    try:
        return cls(pairs)
    except ValidationError as exc:
        raise ValidationError(f"{what}: {exc}") from None


def population_to_csv(p: Population) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["w", "n"])
    for level, n in p.pairs():
        w.writerow([_level_out(level), _level_out(n)])
    return buf.getvalue()


def population_from_csv(text: str, what: str = "population", as_distribution: bool = False) -> Population:
    rows = csv.reader(_io.StringIO(text))
    header = next(rows, None)
    if header is None or [h.strip() for h in header] != ["w", "n"]:
        raise ValidationError(f"{what}: line 1: header must be 'w,n', got {header}")
    pairs = []
    for line, row in enumerate(rows, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ValidationError(f"{what}: line {line}: expected 2 columns, got {len(row)}")
        try:
            pairs.append((as_rational(row[0], "w"), as_count(row[1], "n")))
        except ValidationError as exc:
            raise ValidationError(f"{what}: line {line}: {exc}") from None
    if not pairs:
        raise ValidationError(f"{what}: no data rows")
    cls = Distribution if as_distribution else Population
    try:
        return cls(pairs)
    except ValidationError as exc:
        raise ValidationError(f"{what}: {exc}") from None


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}: invalid JSON ({exc.msg})") from None


def load_population(path, as_distribution: bool = False) -> Population:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        try:
            text = path.read_text()
        except OSError as exc:
            raise ValidationError(f"{path}: cannot read ({exc.strerror})") from None
        return population_from_csv(text, str(path), as_distribution)
    return population_from_dict(read_json(path), str(path), as_distribution)


def load_axiology(path):
    from .axiologies import AxiologySpec

    data = read_json(path)
    try:
        return AxiologySpec.from_dict(data)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def load_scenario(path):
    from .xrisk import Scenario

    data = read_json(path)
    return Scenario.from_dict(data, what=str(path))


def dumps(obj) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
