"""JSON codecs for slopes, markings, universes and weighted laminations.

Decoders raise ParseError naming the offending field, e.g.
``entries[3].terms[0].weight: expected a rational``.
"""
from __future__ import annotations

import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from .boundary import point_from_json, point_to_json
from .errors import ParseError, SemanticError
from .join import (
    CROSSING,
    ComponentSpace,
    ProductPoint,
    Term,
    Universe,
    WeightedLamination,
)
from .slopes import Slope


def load_json(path: str | Path) -> Any:
    text = Path(path).read_text() if str(path) != "-" else sys.stdin.read()
    return loads(text, str(path))


def loads(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def dumps(obj: Any) -> str:
    return json.dumps(obj, separators=(", ", ": "))


def _fail(where: str, msg: str):
    raise ParseError(f"{where}: {msg}")


def _wrap(where: str, fn, *args):
    try:
        return fn(*args)
    except ParseError as exc:
        raise ParseError(f"{where}: {exc}") from None
    except SemanticError as exc:
        raise SemanticError(f"{where}: {exc}") from None


# -- scalars -----------------------------------------------------------------

def slope_to_json(s: Slope) -> str:
    return str(s)


def slope_from_json(obj, where: str = "slope") -> Slope:
    if not isinstance(obj, str):
        _fail(where, "expected a slope string like '3/2'")
    return _wrap(where, Slope.parse, obj)


def fraction_to_json(x: Fraction) -> str:
    return str(x) if x.denominator != 1 else str(x.numerator)


def fraction_from_json(obj, where: str = "weight") -> Fraction:
    if isinstance(obj, bool):
        _fail(where, "expected a rational")
    if isinstance(obj, int):
        return Fraction(obj)
    if isinstance(obj, float):
        return Fraction(str(obj))
    if isinstance(obj, str):
        try:
            return Fraction(obj)
        except (ValueError, ZeroDivisionError):
            _fail(where, f"expected a rational, got {obj!r}")
    _fail(where, "expected a rational")


# -- universe ----------------------------------------------------------------

def universe_to_json(u: Universe) -> dict:
    comps = []
    for c in u.components:
        rec: dict = {"id": c.id, "kind": c.kind}
        if c.basepoint is not None:
            rec["basepoint"] = str(c.basepoint)
        if c.core is not None:
            rec["core"] = str(c.core)
        comps.append(rec)
    return {"components": comps}


def universe_from_json(obj) -> Universe:
    if not isinstance(obj, dict) or not isinstance(obj.get("components"), list):
        _fail("universe", "expected an object with a 'components' list")
    comps = []
    for i, rec in enumerate(obj["components"]):
        where = f"components[{i}]"
        if not isinstance(rec, dict):
            _fail(where, "expected an object")
        cid, kind = rec.get("id"), rec.get("kind")
        if not isinstance(cid, str):
            _fail(f"{where}.id", "expected a string")
        if kind not in ("farey", "annulus"):
            _fail(f"{where}.kind", "expected 'farey' or 'annulus'")
        base = slope_from_json(rec["basepoint"], f"{where}.basepoint") if "basepoint" in rec else None
        core = slope_from_json(rec["core"], f"{where}.core") if "core" in rec else None
        comps.append(_wrap(where, ComponentSpace, cid, kind, base, core))
    return _wrap("universe", Universe, tuple(comps))


# -- points and laminations --------------------------------------------------

def product_point_to_json(p: ProductPoint) -> dict:
    return {"coords": {k: (str(v) if isinstance(v, Slope) else v) for k, v in p.coords}}


def product_point_from_json(obj, where: str = "point") -> ProductPoint:
    if not isinstance(obj, dict) or not isinstance(obj.get("coords"), dict):
        _fail(where, "expected an object with a 'coords' mapping")
    coords = {}
    for k, v in obj["coords"].items():
        if isinstance(v, bool):
            _fail(f"{where}.coords.{k}", "expected a slope string or an integer")
        coords[k] = v if isinstance(v, int) else slope_from_json(v, f"{where}.coords.{k}")
    return _wrap(where, ProductPoint, coords)


def term_to_json(t: Term) -> dict:
    pt = product_point_to_json(t.point) if t.component == CROSSING else point_to_json(t.point)
    return {"component": t.component, "weight": fraction_to_json(t.weight), "point": pt}


def lamination_to_json(w: WeightedLamination) -> dict:
    return {"terms": [term_to_json(t) for t in w.terms]}


def lamination_from_json(obj, where: str = "lamination") -> WeightedLamination:
    if isinstance(obj, dict) and "coords" in obj:
        return WeightedLamination.single(CROSSING, product_point_from_json(obj, where))
    if not isinstance(obj, dict) or not isinstance(obj.get("terms"), list):
        _fail(where, "expected an object with a 'terms' list")
    terms = []
    for i, rec in enumerate(obj["terms"]):
        tw = f"{where}.terms[{i}]"
        if not isinstance(rec, dict):
            _fail(tw, "expected an object")
        comp = rec.get("component")
        if not isinstance(comp, str):
            _fail(f"{tw}.component", "expected a string")
        weight = fraction_from_json(rec.get("weight"), f"{tw}.weight")
        if comp == CROSSING:
            point = product_point_from_json(rec.get("point"), f"{tw}.point")
        else:
            point = _wrap(f"{tw}.point", point_from_json, rec.get("point"))
        terms.append(_wrap(tw, Term, comp, weight, point))
    return _wrap(where, WeightedLamination, tuple(terms))


def sequence_from_json(obj) -> list[WeightedLamination]:
    """A JSON array of lamination records (ProductPoint records are read as
    single crossing terms)."""
    if isinstance(obj, dict) and "entries" in obj:
        obj = obj["entries"]
    if not isinstance(obj, list):
        _fail("sequence", "expected a JSON array")
    return [lamination_from_json(rec, f"entries[{i}]") for i, rec in enumerate(obj)]


def sequence_to_json(seq) -> list:
    return [lamination_to_json(w) for w in seq]
