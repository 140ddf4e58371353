"""Command-line front end.

Every subcommand prints one JSON document (default) or a CSV table with a
fixed column order.  Exit codes: 0 ok, 2 parse error, 3 semantic error,
4 insufficient depth.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io as _stdio
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import io as cio
from .action import (
    MappingClass,
    act_boundary,
    act_slope,
    annular_projection_distance,
    classify,
    north_south_report,
    twist_coordinate,
)
from .boundary import (
    OrientedCurve,
    PrefixStream,
    QuadraticIrrational,
    _settled_product,
    converges_to,
    gromov_product,
    point_from_json,
    point_to_json,
    visual_distance,
)
from .errors import CurvexError, InsufficientDepth, ParseError, SemanticError
from .join import (
    ProductPoint,
    converge_in_X,
    extract_limit,
    w_membership,
)
from .markings import (
    Marking,
    marking_corpus,
    marking_distance_bfs,
    max_projection_gap,
    mm_path,
)
from .scenarios import scenario_corpus
from .slopes import (
    INFINITY,
    Slope,
    continued_fraction,
    farey_distance,
    farey_distance_bfs,
    farey_geodesic,
    is_edge,
    oracle_height,
    oracle_row,
    slopes_in_unit_interval,
)

DEFAULT_SEED = 20260101

# CSV column orders (frozen; documented in the README)
COLUMNS = {
    "farey": ["a", "b", "distance"],
    "geodesic": ["step", "slope"],
    "cf": ["slope", "cf"],
    "edge": ["a", "b", "edge"],
    "product": ["x", "y", "base", "lower", "exact"],
    "visual": ["x", "y", "base", "distance"],
    "converges": ["target", "window", "converges"],
    "act": ["matrix", "input", "image"],
    "classify": ["matrix", "kind", "fixed_slope", "attracting", "repelling"],
    "orbit": ["iter", "slope", "product_with_target"],
    "project": ["about", "x", "y", "value"],
    "marking_dist": ["m1", "m2", "distance"],
    "marking_path": ["m1", "m2", "length", "moves"],
    "marking_gap": ["m1", "m2", "witness", "gap"],
    "limit": ["index"],
    "wtest": ["j", "delta", "member"],
    "sweep_farey": ["case", "a", "b", "ladder", "bfs", "match"],
    "sweep_markings": ["case", "m1", "m2", "bfs", "path_length", "witness", "gap"],
    "sweep_limits": ["case", "kind", "components", "status", "limit"],
    "tessellation": ["kind", "a", "b", "c", "xa", "xb", "xc"],
}


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    depth: int = 40
    window: int = 2
    tolerance: Fraction = Fraction(1, 20)
    seed: int = DEFAULT_SEED
    fmt: str = "json"

    def __post_init__(self):
        if self.depth < 1:
            raise SemanticError("depth must be at least 1")
        if self.window < 1:
            raise SemanticError("window must be at least 1")
        if self.tolerance <= 0:
            raise SemanticError("tolerance must be positive")


# -- argument helpers ----------------------------------------------------------

def _slope(text: str) -> Slope:
    return Slope.parse(text)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}") from None


_CURVE = re.compile(r"\s*([+-]?\d+(?:/\d+)?)\s*([+-])\s*")
_CF = re.compile(r"\s*\[\s*(.*?)\s*\]\s*")


def parse_point(text: str):
    """A boundary point given as JSON, as 'p/q+' / 'p/q-', as a periodic code
    '[a0;a1,(p1,p2)]', or as a finite prefix '[a0;a1,a2,...]'."""
    text = text.strip()
    if text.startswith("{"):
        return point_from_json(cio.loads(text, "point"))
    m = _CURVE.fullmatch(text)
    if m:
        return OrientedCurve(Slope.parse(m.group(1)), 1 if m.group(2) == "+" else -1)
    m = _CF.fullmatch(text)
    if not m:
        raise ParseError(f"cannot parse boundary point {text!r}")
    body = m.group(1)
    try:
        if "(" in body:
            head, per = body.split("(", 1)
            per = per.rstrip(")").strip()
            head = head.rstrip(",").strip()
            pre = [int(t) for t in re.split(r"[;,]", head) if t.strip()] if head else []
            return QuadraticIrrational(tuple(pre), tuple(int(t) for t in per.split(",")))
        body = body.replace("...", "").rstrip(",")
        qs = [int(t) for t in re.split(r"[;,]", body) if t.strip()]
        return PrefixStream(tuple(qs))
    except ValueError:
        raise ParseError(f"cannot parse boundary point {text!r}") from None
    except SemanticError as exc:
        raise ParseError(f"{text!r}: {exc}") from None


def _json_or_file(text: str):
    if text.startswith("@"):
        return cio.load_json(text[1:])
    return cio.loads(text, "argument")


# -- output ------------------------------------------------------------------

def _emit(cfg: RunConfig, table: str, payload, rows: list[dict], out) -> None:
    if cfg.fmt == "json":
        out.write(cio.dumps(payload) + "\n")
        return
    cols = COLUMNS[table]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow(["" if r.get(c) is None else _cell(r.get(c)) for c in cols])


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (dict, list)):
        return cio.dumps(v)
    return str(v)


# -- subcommands -----------------------------------------------------------------

def cmd_farey(cfg: RunConfig, args, out) -> None:
    if args.op == "dist":
        a, b = _slope(args.a), _slope(args.b)
        d = farey_distance(a, b)
        _emit(cfg, "farey", d, [{"a": a, "b": b, "distance": d}], out)
    elif args.op == "bfs":
        a, b = _slope(args.a), _slope(args.b)
        d = farey_distance_bfs(a, b)
        _emit(cfg, "farey", d, [{"a": a, "b": b, "distance": d}], out)
    elif args.op == "geodesic":
        path = farey_geodesic(_slope(args.a), _slope(args.b))
        _emit(cfg, "geodesic", [str(s) for s in path],
              [{"step": i, "slope": s} for i, s in enumerate(path)], out)
    elif args.op == "edge":
        a, b = _slope(args.a), _slope(args.b)
        e = is_edge(a, b)
        _emit(cfg, "edge", e, [{"a": a, "b": b, "edge": e}], out)
    elif args.op == "cf":
        a = _slope(args.a)
        cf = str(continued_fraction(a))
        _emit(cfg, "cf", cf, [{"slope": a, "cf": cf}], out)


def cmd_boundary(cfg: RunConfig, args, out) -> None:
    base = _slope(args.base)
    if args.op in ("product", "visual"):
        x, y = parse_point(args.x), parse_point(args.y)
        if args.op == "product":
            est = gromov_product(x, y, base, cfg.depth)
            rec = {"lower": est.lower, "exact": est.exact}
            _emit(cfg, "product", rec, [{"x": x, "y": y, "base": base, **rec}], out)
        else:
            d = visual_distance(x, y, base, cfg.depth)
            _emit(cfg, "visual", str(d), [{"x": x, "y": y, "base": base, "distance": d}], out)
    elif args.op == "converges":
        target = parse_point(args.x)
        seq = [_slope(t) for t in args.slopes]
        ok = converges_to(seq, target, cfg.window, base)
        _emit(cfg, "converges", ok, [{"target": target, "window": cfg.window, "converges": ok}], out)


def cmd_act(cfg: RunConfig, args, out) -> None:
    m = MappingClass.parse(args.matrix)
    if args.classify:
        nt = classify(m)
        rec = {
            "kind": nt.kind,
            "fixed_slope": str(nt.fixed_slope) if nt.fixed_slope else None,
            "attracting": point_to_json(nt.attracting) if nt.attracting else None,
            "repelling": point_to_json(nt.repelling) if nt.repelling else None,
        }
        row = {"matrix": m, "kind": nt.kind, "fixed_slope": nt.fixed_slope,
               "attracting": nt.attracting, "repelling": nt.repelling}
        _emit(cfg, "classify", rec, [row], out)
        return
    if args.slope is not None:
        s = _slope(args.slope)
        img = act_slope(m, s)
        _emit(cfg, "act", str(img), [{"matrix": m, "input": s, "image": img}], out)
        return
    if args.point is not None:
        x = parse_point(args.point)
        img = act_boundary(m, x, cfg.depth if isinstance(x, PrefixStream) else None)
        _emit(cfg, "act", point_to_json(img), [{"matrix": m, "input": x, "image": img}], out)
        return
    raise ParseError("act needs --slope, --point or --classify")


def cmd_orbit(cfg: RunConfig, args, out) -> None:
    m = MappingClass.parse(args.matrix)
    start = _slope(args.start)
    base = _slope(args.base)
    nt = classify(m)
    rows = []
    if nt.kind == "pseudo-Anosov":
        rep = north_south_report(m, [start], args.iters, base)[start]
        rows = [{"iter": r["iter"], "slope": str(r["slope"]), "product_with_target": r["product"]}
                for r in rep[1:]]
    else:
        s = start
        for k in range(1, args.iters + 1):
            s = act_slope(m, s)
            rows.append({"iter": k, "slope": str(s), "product_with_target": None})
    _emit(cfg, "orbit", rows, rows, out)


def cmd_project(cfg: RunConfig, args, out) -> None:
    about = _slope(args.about)
    x = _slope(args.x)
    if args.y is None:
        v = twist_coordinate(x, about)
        _emit(cfg, "project", v, [{"about": about, "x": x, "y": None, "value": v}], out)
    else:
        y = _slope(args.y)
        v = annular_projection_distance(x, y, about)
        _emit(cfg, "project", v, [{"about": about, "x": x, "y": y, "value": v}], out)


def cmd_marking(cfg: RunConfig, args, out) -> None:
    m1, m2 = Marking.parse(args.m1), Marking.parse(args.m2)
    if args.op == "dist":
        d = marking_distance_bfs(m1, m2, args.cap)
        if d is None:
            raise InsufficientDepth(f"marking distance exceeds the cap {args.cap}")
        _emit(cfg, "marking_dist", d, [{"m1": m1, "m2": m2, "distance": d}], out)
    elif args.op == "path":
        p = mm_path(m1, m2)
        rec = {"length": len(p), "moves": str(p)}
        _emit(cfg, "marking_path", rec, [{"m1": m1, "m2": m2, **rec}], out)
    else:
        witness, gap = max_projection_gap(m1, m2)
        rec = {"witness": str(witness), "gap": gap}
        _emit(cfg, "marking_gap", rec, [{"m1": m1, "m2": m2, **rec}], out)


def cmd_limit(cfg: RunConfig, args, out) -> None:
    universe = cio.universe_from_json(cio.load_json(args.universe))
    seq = cio.sequence_from_json(cio.load_json(args.input))
    ex = extract_limit(seq, universe, cfg.depth, cfg.window, cfg.tolerance)
    payload = {"indices": list(ex.indices), "limit": cio.lamination_to_json(ex.limit)}
    _emit(cfg, "limit", payload, [{"index": i} for i in ex.indices], out)


def cmd_wtest(cfg: RunConfig, args, out) -> None:
    universe = cio.universe_from_json(cio.load_json(args.universe))
    target = cio.lamination_from_json(_json_or_file(args.target), "target")
    point = cio.product_point_from_json(_json_or_file(args.point), "point")
    ok = w_membership(point, target, args.j, _fraction(args.delta), universe, cfg.depth)
    _emit(cfg, "wtest", ok, [{"j": args.j, "delta": args.delta, "member": ok}], out)


def _farey_source(args):
    i, slopes, h = args
    a, rest = slopes[i], slopes[i + 1:]
    out = []
    for b, d in zip(rest, oracle_row(a, rest, h)):
        ladder = farey_distance(a, b)
        out.append({"a": str(a), "b": str(b), "ladder": ladder, "bfs": d, "match": ladder == d})
    return out


def _limit_case(args):
    cid, sc, depth, window, tol = args
    comps = "+".join(f"{c.id}:{c.kind}" for c in sc.universe.components)
    try:
        ex = extract_limit(sc.entries, sc.universe, depth, window, tol)
    except InsufficientDepth as exc:
        return {"case": cid, "kind": sc.kind, "components": comps, "status": "insufficient-depth",
                "limit": str(exc)}
    sub = [sc.entries[i] for i in ex.indices]
    ok = converge_in_X(sub, ex.limit, sc.universe, tol, window, depth).converges
    lim = cio.lamination_to_json(ex.limit)
    return {"case": cid, "kind": sc.kind, "components": comps, "status": "ok" if ok else "unsound",
            "limit": lim}


def cmd_sweep(cfg: RunConfig, args, out) -> None:
    if args.scenario == "farey":
        slopes = slopes_in_unit_interval(args.size)
        h = oracle_height(*slopes)
        per_source = _run_cases(_farey_source, [(i, slopes, h) for i in range(len(slopes))], args.jobs)
        rows = [{"case": k, **r} for k, r in enumerate(r for rs in per_source for r in rs)]
        table = "sweep_farey"
    elif args.scenario == "markings":
        rows = []
        for i, (m1, m2, d) in enumerate(marking_corpus(cfg.seed, args.size)):
            witness, gap = max_projection_gap(m1, m2)
            rows.append({"case": i, "m1": str(m1), "m2": str(m2), "bfs": d,
                         "path_length": len(mm_path(m1, m2)), "witness": str(witness), "gap": gap})
        table = "sweep_markings"
    else:
        cases = [(i, sc, cfg.depth, cfg.window, cfg.tolerance)
                 for i, sc in enumerate(scenario_corpus(cfg.seed, args.size))]
        rows = _run_cases(_limit_case, cases, args.jobs)
        table = "sweep_limits"
    rows.sort(key=lambda r: r["case"])
    _emit(cfg, table, rows, rows, out)


def _run_cases(fn, cases, jobs: int) -> list:
    if jobs <= 1:
        return [fn(c) for c in cases]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, cases, chunksize=64))


def cmd_tessellation(cfg: RunConfig, args, out) -> None:
    # every Farey triangle with finite vertices has its largest-denominator
    # vertex equal to the mediant of the other two
    n, span = args.max_q, args.span
    if n < 1 or span < 0:
        raise SemanticError("--max-q must be positive and --span non-negative")
    vs = [INFINITY] + sorted({Slope.of(p, q) for q in range(1, n + 1) for p in range(-span * q, span * q + 1)},
                             key=Slope.to_fraction)
    vset = set(vs)

    def x(s):
        return None if s.is_infinite else format(float(s.to_fraction()), ".12g")

    edges = [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:] if is_edge(a, b)]
    tris = []
    for a, b in edges:
        if a.is_infinite:
            if b.q == 1 and Slope(b.p + 1, 1) in vset:
                tris.append((b, Slope(b.p + 1, 1), a))
            continue
        m = Slope.of(a.p + b.p, a.q + b.q)
        if m in vset:
            tris.append((a, m, b) if a.to_fraction() < b.to_fraction() else (b, m, a))
    tris.sort(key=lambda t: (t[0].to_fraction(), t[1].q))
    rows = [{"kind": "vertex", "a": v, "xa": x(v)} for v in vs]
    rows += [{"kind": "edge", "a": a, "b": b, "xa": x(a), "xb": x(b)} for a, b in edges]
    rows += [{"kind": "triangle", "a": a, "b": b, "c": c, "xa": x(a), "xb": x(b), "xc": x(c)}
             for a, b, c in tris]
    payload = {
        "vertices": [{"slope": str(v), "x": x(v)} for v in vs],
        "edges": [[str(a), str(b)] for a, b in edges],
        "triangles": [[str(a), str(b), str(c)] for a, b, c in tris],
    }
    _emit(cfg, "tessellation", payload, rows, out)


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    common.add_argument("--depth", type=int, default=40)
    common.add_argument("--window", type=int, default=2)
    common.add_argument("--tolerance", default="1/20")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = argparse.ArgumentParser(prog="curvex", description="Curve graph and boundary toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("farey", parents=[common], help="Farey graph distances and geodesics")
    f.add_argument("op", choices=("dist", "bfs", "geodesic", "edge", "cf"))
    f.add_argument("a")
    f.add_argument("b", nargs="?", default="1/0")

    b = sub.add_parser("boundary", parents=[common], help="Gromov products and convergence")
    b.add_argument("op", choices=("product", "visual", "converges"))
    b.add_argument("x")
    b.add_argument("y", nargs="?")
    b.add_argument("slopes", nargs="*")
    b.add_argument("--base", default="1/0")

    a = sub.add_parser("act", parents=[common], help="mapping class action")
    a.add_argument("--matrix", required=True)
    a.add_argument("--slope")
    a.add_argument("--point")
    a.add_argument("--classify", action="store_true")

    o = sub.add_parser("orbit", parents=[common], help="orbit of a slope with products")
    o.add_argument("--matrix", required=True)
    o.add_argument("--start", required=True)
    o.add_argument("--iters", type=int, default=10)
    o.add_argument("--base", default="1/0")

    pr = sub.add_parser("project", parents=[common], help="annular projections")
    pr.add_argument("--about", required=True)
    pr.add_argument("x")
    pr.add_argument("y", nargs="?")

    mk = sub.add_parser("marking", parents=[common], help="marking graph")
    mk.add_argument("op", choices=("dist", "path", "gap"))
    mk.add_argument("m1")
    mk.add_argument("m2")
    mk.add_argument("--cap", type=int, default=40)

    li = sub.add_parser("limit", parents=[common], help="extract a convergent subsequence and limit")
    li.add_argument("--universe", required=True)
    li.add_argument("--input", required=True)

    w = sub.add_parser("wtest", parents=[common], help="membership in W(xi, j, delta)")
    w.add_argument("--universe", required=True)
    w.add_argument("--target", required=True, help="lamination JSON or @file")
    w.add_argument("--point", required=True, help="product point JSON or @file")
    w.add_argument("--j", type=int, required=True)
    w.add_argument("--delta", required=True)

    sw = sub.add_parser("sweep", parents=[common], help="seeded scenario runners")
    sw.add_argument("scenario", choices=("farey", "markings", "limits"))
    sw.add_argument("--size", type=int, default=None)
    sw.add_argument("--jobs", type=int, default=1)

    t = sub.add_parser("tessellation", parents=[common], help="Farey tessellation data for plotting")
    t.add_argument("--max-q", type=int, default=8)
    t.add_argument("--span", type=int, default=1)
    # let negative slopes such as -2/5 pass as positionals
    for parser in [p, *sub.choices.values()]:
        parser._negative_number_matcher = re.compile(r"^-\d")
    return p


HANDLERS = {
    "farey": cmd_farey,
    "boundary": cmd_boundary,
    "act": cmd_act,
    "orbit": cmd_orbit,
    "project": cmd_project,
    "marking": cmd_marking,
    "limit": cmd_limit,
    "wtest": cmd_wtest,
    "sweep": cmd_sweep,
    "tessellation": cmd_tessellation,
}

SWEEP_SIZES = {"farey": 12, "markings": 50, "limits": 30}


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err), contextlib.redirect_stdout(out):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        seed = args.seed
        if os.environ.get("CURVEX_SEED"):
            try:
                seed = int(os.environ["CURVEX_SEED"])
            except ValueError:
                raise ParseError("CURVEX_SEED must be an integer") from None
        cfg = RunConfig(args.command, [], args.depth, args.window, _fraction(args.tolerance), seed, args.fmt)
        if args.command == "boundary" and args.op != "converges" and args.y is None:
            raise ParseError(f"boundary {args.op} needs two points")
        if args.command == "boundary" and args.op == "converges" and args.y is not None:
            args.slopes = [args.y] + list(args.slopes)
        if args.command == "sweep" and args.size is None:
            args.size = SWEEP_SIZES[args.scenario]
        buf = _stdio.StringIO()
        HANDLERS[args.command](cfg, args, buf)
        out.write(buf.getvalue())
        return 0
    except CurvexError as exc:
        err.write(f"curvex: error: {exc}\n")
        return exc.exit_code
    except OSError as exc:
        err.write(f"curvex: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
