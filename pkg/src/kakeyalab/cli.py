"""Command-line verification driver.

Subcommands run the exact-arithmetic experiments and emit structured
reports (text to stdout, JSON/CSV/SVG artifacts with --out).  Exit
codes: 0 all asserted checks pass, 1 an asserted check failed, 2 a
resource cap made the request infeasible, 3 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .construction import (
    CapExceeded,
    PrecursorSpec,
    b_exact,
    family_grid_areas,
    fold_point,
    intercept_grid,
    lines_of_Fk,
    precursor_family,
)
from .martingale import (
    AveragedSpec,
    DEFAULT_K_CAP,
    DyadicSquare,
    MartingaleEngine,
    MasterSpec,
    OpenSetSpec,
    master_tail_bound,
    pair_index,
    stabilization_level,
    threshold_level,
)
from .numeric import Dyadic, Rat, is_dyadic, parse_rat, rat_str
from .region import ConvexPoly, Region, contains_point, union_area
from .report import Report, Table, fmt_value
from .sequence import block, block_offset, check_obs1
from .svg import SvgCanvas

__all__ = ["main"]

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INFEASIBLE = 2
EXIT_USAGE = 3

# containment sampling density: slopes on the 2**-SLOPE_K grid, and
# X_SAMPLES odd-numerator dyadic abscissas per strip (never on a wall)
SLOPE_K = 6
X_SAMPLES = 16


class UsageError(ValueError):
    """Bad parameters or violated command preconditions."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 3, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# argument conversion (ValueError -> argparse error -> exit 3)
# ---------------------------------------------------------------------------


def rational(text: str) -> Rat:
    return parse_rat(text)

def dyadic(text: str) -> Dyadic:
    return Dyadic.from_rat(parse_rat(text))


def point(text: str) -> tuple[Rat, Rat]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError("point must be 'x,y' with rational coordinates")
    return parse_rat(parts[0]), parse_rat(parts[1])


def int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",")]


# ---------------------------------------------------------------------------
# seq
# ---------------------------------------------------------------------------


def cmd_seq(args) -> Report:
    rep = Report("seq", {"m_hi": args.m_hi})
    if args.m_hi < 4:
        raise UsageError("--m-hi must be >= 4 (the index bound starts there)")

    blocks = Table("blocks", ["k", "level", "value"])
    for level in range(4):
        blk = block(level)
        for pos, val in enumerate(blk.values):
            blocks.rows.append([str(blk.start + pos), str(level), rat_str(val.to_rat())])
    rep.tables.append(blocks)

    obs = Table("obs1", ["m", "max_index", "bound_4m", "proof_sum", "ok"])
    for row in check_obs1(4, args.m_hi):
        # the source proof sums block sizes one short per level; the
        # corrected max index exceeds that sum by m+1 and must still fit
        proof_sum = block_offset(row.m + 1) - (row.m + 1)
        obs.rows.append(
            [str(row.m), str(row.max_index), str(row.bound),
             str(proof_sum), "true" if row.ok else "false"]
        )
        rep.check(f"max index in block {row.m}", row.max_index, "<=", row.bound)
    rep.tables.append(obs)
    rep.value(
        "proof_sum_note",
        "block sizes are 2^l(2l+1); the proof's per-level sum is one short "
        "per block (off by m+1 in total at level m); the 4^m bound holds "
        "for m >= 4 under the corrected count",
    )
    return rep


# ---------------------------------------------------------------------------
# lemma2
# ---------------------------------------------------------------------------


def _valid_anchors(m: int) -> list[Rat]:
    """Every anchor of level m: the m-dyadic points of [-m, m]."""
    step = Fraction(1, 1 << m)
    count = 2 * m * (1 << m) + 1
    return [-m + t * step for t in range(count)]


def _lemma2_cell(item: tuple[int, Rat, int | None]) -> dict:
    m, xhat, k_override = item
    t0 = time.perf_counter()
    try:
        spec = PrecursorSpec.resolve(m, Dyadic.from_rat(xhat), k_override=k_override)
        fam = precursor_family(spec)
    except CapExceeded as exc:
        return {"m": m, "xhat": xhat, "cap": str(exc)}
    area = sum(family_grid_areas(fam, [], []).values(), Fraction(0))

    samples = failures = 0
    witness = None
    if spec.coupled:
        # containment needs the anchored family; a decoupled override k
        # changes the tube budget and voids the limit-intercept argument
        x0 = spec.xhat.to_rat()
        xs = [x0 + Fraction(2 * t + 1, X_SAMPLES * 2 << m) for t in range(X_SAMPLES)]
        for s in range(1 << SLOPE_K):
            a = Fraction(s, 1 << SLOPE_K)
            b = b_exact(a)
            for x in xs:
                samples += 1
                if not contains_point(fam.region, (x, a * x + b), mode="interior"):
                    failures += 1
                    if witness is None:
                        witness = (rat_str(x), rat_str(a))
    return {
        "m": m,
        "xhat": xhat,
        "k": spec.k,
        "delta": spec.delta,
        "coupled": spec.coupled,
        "area": area,
        "samples": samples,
        "failures": failures,
        "witness": witness,
        "ms": int((time.perf_counter() - t0) * 1000),
    }


def _lemma2_items(args) -> list[tuple[int, Rat, int | None]]:
    if args.grid:
        levels = [args.m] if args.m is not None else [0, 1]
        items: list[tuple[int, Rat, int | None]] = []
        for m in levels:
            if m > 2 and not args.big:
                raise UsageError(
                    f"grid at m={m} needs --big (or run single anchors with --k-override)"
                )
            for anchor in _valid_anchors(m):
                if m == 2 and not args.big:
                    spec = PrecursorSpec.resolve(m, Dyadic.from_rat(anchor))
                    if spec.k > 16:
                        continue
                items.append((m, anchor, None))
        return items
    if args.m is None or args.xhat is None:
        raise UsageError("need --m and --xhat (or --grid)")
    return [(args.m, args.xhat.to_rat(), args.k_override)]


def cmd_lemma2(args) -> Report:
    items = _lemma2_items(args)
    rep = Report(
        "lemma2",
        {
            "grid": args.grid,
            "m": args.m,
            "xhat": None if args.xhat is None else rat_str(args.xhat.to_rat()),
            "k_override": args.k_override,
            "big": args.big,
            "cells": len(items),
            "slope_k": SLOPE_K,
            "x_samples": X_SAMPLES,
            "jobs": args.jobs,
        },
    )
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            cells = list(pool.map(_lemma2_cell, items))
    else:
        cells = [_lemma2_cell(item) for item in items]

    table = Table(
        "cells",
        ["m", "xhat", "k", "delta", "exact_area", "bound_guaranteed",
         "bound_paper", "ratio", "runtime_ms"],
    )
    for cell in cells:
        m = cell["m"]
        name = f"m={m}, xhat={rat_str(cell['xhat'])}"
        if "cap" in cell:
            rep.cap(f"{name}: {cell['cap']}")
            continue
        area = cell["area"]
        guaranteed = Fraction(2) ** (4 - 2 * m)
        paper = Fraction(2) ** (2 - 2 * m)
        table.rows.append(
            [str(m), rat_str(cell["xhat"]), str(cell["k"]), rat_str(cell["delta"]),
             rat_str(area), rat_str(guaranteed), rat_str(paper),
             rat_str(area / paper), str(cell["ms"])]
        )
        rep.check(f"area[{name}]", area, "<=", guaranteed,
                  note="hexagon-sum guarantee 2^(4-2m)")
        rep.compare(f"area[{name}] vs source bound", area, "<=", paper,
                    note="2^(2-2m), reported only")
        if cell["samples"]:
            note = "" if cell["failures"] == 0 else f"first miss at x={cell['witness'][0]}, a={cell['witness'][1]}"
            rep.check(
                f"containment[{name}]",
                cell["samples"] - cell["failures"], "==", cell["samples"],
                note=note or f"{cell['samples']} sampled line points strictly inside",
            )
        else:
            rep.value(f"containment[{name}]", "skipped (decoupled k)")
    rep.tables.append(table)
    return rep


# ---------------------------------------------------------------------------
# theorem1
# ---------------------------------------------------------------------------


def _rect_region(x0: Rat, y0: Rat, x1: Rat, y1: Rat) -> Region:
    poly = ConvexPoly.from_points([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    assert poly is not None
    return Region((poly,))


def _theorem1_region(args, engine: MartingaleEngine) -> tuple[str, Region]:
    if args.region == "half":
        return "open square (0,1/2)^2", _rect_region(
            Fraction(0), Fraction(0), Fraction(1, 2), Fraction(1, 2)
        )
    if args.region == "unit":
        return "unit square", _rect_region(
            Fraction(0), Fraction(0), Fraction(1), Fraction(1)
        )
    if args.m is None or args.xhat is None:
        raise UsageError("region 'piece' needs --m and --xhat (and optional --j)")
    fam = engine.piece(args.m, args.xhat, args.j)
    return (
        f"piece m={args.m}, xhat={rat_str(args.xhat.to_rat())}, j={args.j}",
        fam.region,
    )


def cmd_theorem1(args) -> Report:
    engine = MartingaleEngine(k_cap=DEFAULT_K_CAP)
    label, region = _theorem1_region(args, engine)
    pt = args.point
    rep = Report(
        "theorem1",
        {
            "region": label,
            "point": [rat_str(pt[0]), rat_str(pt[1])],
            "r_max": args.r_max,
            "k_cap": DEFAULT_K_CAP,
        },
    )
    area = union_area(region.clip_to_rect((Fraction(0), Fraction(0), Fraction(1), Fraction(1))))
    inside = contains_point(region, pt, mode="interior")
    target = 1 / area if (area > 0 and inside) else Fraction(0)
    rep.value("unit_square_measure", area)
    rep.value("point_interior", inside)
    rep.value("target", target)

    spec = OpenSetSpec(region)
    trace = engine.trace(pt, spec, args.r_max)
    rep.traces.append(trace.to_json(spec))
    table = Table("trace", ["r", "u", "v", "value"])
    for rec in trace.records:
        table.rows.append([str(rec.r), str(rec.square.u), str(rec.square.v), rat_str(rec.value)])
    rep.tables.append(table)

    if trace.truncated:
        rep.cap("trace truncated by construction cap")
    r0 = stabilization_level(trace, target)
    rep.check_that(
        f"trace stabilizes at {fmt_value(target)} by r_max",
        r0 is not None,
        detail=f"r0={r0}" if r0 is not None else "no stabilization",
    )
    if r0 is not None:
        rep.value("r0", r0)
    return rep


# ---------------------------------------------------------------------------
# lemma4
# ---------------------------------------------------------------------------


def cmd_lemma4(args) -> Report:
    a = args.slope
    if not is_dyadic(a) or not (0 <= a < 1):
        raise UsageError("--slope must be a dyadic rational in [0, 1)")
    y = a * args.x + b_exact(a)
    folded = fold_point(args.x, y)
    if args.i is not None and args.i != folded.i:
        raise UsageError(
            f"--i {args.i} does not match the folded point (x maps to strip {folded.i})"
        )
    if args.j is not None and args.j != folded.j:
        raise UsageError(
            f"--j {args.j} does not match the folded point (y = {rat_str(y)} "
            f"lies in row {folded.j})"
        )
    if args.m < abs(folded.i) + 1:
        raise UsageError(f"need m >= |i|+1 = {abs(folded.i) + 1}, got m={args.m}")

    threshold = Fraction(2) ** (args.m - 2)
    rep = Report(
        "lemma4",
        {
            "m": args.m,
            "i": folded.i,
            "j": folded.j,
            "slope": rat_str(a),
            "x": rat_str(args.x),
            "point": [rat_str(folded.point[0]), rat_str(folded.point[1])],
            "r_max": args.r_max,
            "threshold": rat_str(threshold),
            "k_cap": DEFAULT_K_CAP,
        },
    )
    engine = MartingaleEngine(k_cap=DEFAULT_K_CAP)
    spec = AveragedSpec(args.m, folded.i, folded.j)
    trace = engine.trace(folded.point, spec, args.r_max)
    rep.traces.append(trace.to_json(spec))
    table = Table("trace", ["r", "u", "v", "value"])
    for rec in trace.records:
        table.rows.append([str(rec.r), str(rec.square.u), str(rec.square.v), rat_str(rec.value)])
    rep.tables.append(table)
    if trace.truncated:
        rep.cap("trace truncated by construction cap")

    r0 = threshold_level(trace, threshold)
    rep.check_that(
        f"averaged martingale reaches and holds >= {fmt_value(threshold)}",
        r0 is not None,
        detail=f"r0={r0}" if r0 is not None else "threshold not held by r_max",
    )
    if r0 is not None:
        rep.value("r0", r0)
        rep.value("value_at_r_max", trace.records[-1].value)
    return rep


# ---------------------------------------------------------------------------
# success-trend
# ---------------------------------------------------------------------------


def cmd_success_trend(args) -> Report:
    a = args.slope
    if not is_dyadic(a) or not (0 <= a < 1):
        raise UsageError("--slope must be a dyadic rational in [0, 1)")
    y = a * args.x + b_exact(a)
    folded = fold_point(args.x, y)
    i, j = folded.i, folded.j
    pi = pair_index(i, j)
    rep = Report(
        "success-trend",
        {
            "slope": rat_str(a),
            "x": rat_str(args.x),
            "point": [rat_str(folded.point[0]), rat_str(folded.point[1])],
            "i": i,
            "j": j,
            "pi": pi,
            "m_max": args.m_max,
            "t": args.t,
            "r_max": args.r_max,
            "k_cap": DEFAULT_K_CAP,
        },
    )
    engine = MartingaleEngine(k_cap=DEFAULT_K_CAP)
    q_final = DyadicSquare.containing(folded.point, args.r_max)

    trend = Table("trend", ["m_max", "r", "value", "tail_bound"])
    for m_max in args.m_max:
        spec = MasterSpec(m_max)
        trace = engine.trace(folded.point, spec, args.r_max)
        rep.traces.append(trace.to_json(spec))
        if trace.truncated:
            rep.cap(f"m_max={m_max}: trace truncated by construction cap")
            continue
        for rec in trace.records:
            trend.rows.append(
                [str(m_max), str(rec.r), rat_str(rec.value),
                 rat_str(master_tail_bound(rec.r, m_max))]
            )
    rep.tables.append(trend)

    layers = Table(
        "layers",
        ["m", "weight", "layer_value", "layer_floor", "cumulative_floor"],
    )
    m_top = max(args.m_max) if args.m_max else 0
    # weight * 2**(m-2) = 2**(-pi-2) for every layer, so the floors stack
    # linearly: m_max - |i| layers each add the same amount
    floor_unit = Fraction(1, 1 << (pi + 2))
    cumulative = Fraction(0)
    for m in range(abs(i) + 1, m_top + 1):
        weight = Fraction(1, 1 << (m + pi))
        layer = weight * engine.averaged_value(m, i, j, q_final)
        cumulative += floor_unit
        layers.rows.append(
            [str(m), rat_str(weight), rat_str(layer), rat_str(floor_unit),
             rat_str(cumulative)]
        )
        rep.check(f"layer m={m} contribution at r={args.r_max}", layer, ">=",
                  floor_unit, note="weight * 2^(m-2) floor")
    rep.tables.append(layers)
    rep.value("cumulative_floor", cumulative)
    return rep


# ---------------------------------------------------------------------------
# martingale-check
# ---------------------------------------------------------------------------


def cmd_martingale_check(args) -> Report:
    engine = MartingaleEngine(k_cap=DEFAULT_K_CAP)
    if args.spec == "open-half":
        spec = OpenSetSpec(
            _rect_region(Fraction(0), Fraction(0), Fraction(1, 2), Fraction(1, 2))
        )
        label = "OpenSet((0,1/2)^2)"
    elif args.spec == "open-unit":
        spec = OpenSetSpec(
            _rect_region(Fraction(0), Fraction(0), Fraction(1), Fraction(1))
        )
        label = "OpenSet(unit square)"
    elif args.spec == "averaged":
        spec = AveragedSpec(args.m if args.m is not None else 1, args.i, args.j)
        label = f"Averaged({spec.m},{spec.i},{spec.j})"
    elif args.spec == "master":
        spec = MasterSpec(args.m_max if args.m_max is not None else 2)
        label = f"MasterTruncated(m_max={spec.m_max})"
    else:  # argparse choices prevent this
        raise UsageError(f"unknown spec {args.spec!r}")

    rep = Report(
        "martingale-check",
        {"spec": label, "r_max": args.r_max, "k_cap": DEFAULT_K_CAP},
    )
    try:
        result = engine.verify_martingale_identity(spec, args.r_max)
    except CapExceeded as exc:
        rep.cap(str(exc))
        return rep
    rep.value("initial", result.initial)
    rep.value("parents_checked", result.parents_checked)
    rep.check(
        "averaging identity failures", len(result.identity_failures), "==", 0,
        note=f"exact d(Q) == mean of children over {result.parents_checked} squares",
    )
    rep.check(
        "growth bound failures", len(result.growth_failures), "==", 0,
        note="d(Q_r) <= 4^r * d(root) for all checked squares",
    )
    for row in result.identity_failures[:5]:
        sq = row.square
        rep.value(
            f"identity_mismatch_r{sq.r}_{sq.u}_{sq.v}",
            f"value {rat_str(row.value)} vs child average {rat_str(row.child_average)}",
        )
    return rep


# ---------------------------------------------------------------------------
# render
# ---------------------------------------------------------------------------


def _clip_line_to_square(a: Rat, b: Rat) -> tuple[Rat, Rat] | None:
    """x-interval where y = a*x + b stays inside [-1,1]^2 (a >= 0)."""
    lo, hi = Fraction(-1), Fraction(1)
    if a == 0:
        return (lo, hi) if -1 <= b <= 1 else None
    lo = max(lo, (-1 - b) / a)
    hi = min(hi, (1 - b) / a)
    return (lo, hi) if lo <= hi else None


def cmd_render(args) -> Report:
    rep = Report(
        "render",
        {"target": args.target, "out": str(args.out)},
    )
    if args.target == "figure1":
        grid = intercept_grid(8)
        ymin, ymax = min(grid), max(grid)
        pad = Fraction(1, 16)
        canvas = SvgCanvas(640, 480, (Fraction(0), ymin - pad, Fraction(1), ymax + pad))
        canvas.frame()
        if ymin < 0 < ymax:
            canvas.line(Fraction(0), Fraction(0), Fraction(1), Fraction(0),
                        stroke="#999999", width=0.5)
        denom = 1 << 8
        for q_idx, b in enumerate(grid):
            canvas.circle(Fraction(q_idx, denom), b, radius=1.5)
        count = len(grid)
        rep.check("figure1 marker count", count, "==", 256)
        rep.value("b8_min", ymin)
        rep.value("b8_max", ymax)
    elif args.target == "figure2":
        lines = lines_of_Fk(8)
        canvas = SvgCanvas(560, 560, (Fraction(-1), Fraction(-1), Fraction(1), Fraction(1)))
        canvas.frame()
        count = 0
        for ln in lines:
            seg = _clip_line_to_square(ln.slope, ln.intercept)
            if seg is None:
                continue
            x0, x1 = seg
            canvas.line(x0, ln.y(x0), x1, ln.y(x1), width=0.6, opacity=0.8)
            count += 1
        rep.check("figure2 segment count", count, "==", 256)
    elif args.target == "region":
        if args.m is None or args.xhat is None:
            raise UsageError("render region needs --m and --xhat")
        spec = PrecursorSpec.resolve(args.m, args.xhat, k_override=args.k_override)
        fam = precursor_family(spec)
        bx0, by0, bx1, by1 = fam.region.bbox()
        pad = Fraction(1, 8)
        canvas = SvgCanvas(640, 640, (bx0 - pad, by0 - pad, bx1 + pad, by1 + pad))
        g = args.grid
        step = Fraction(1, 1 << g)
        t = math.floor(bx0 / step)
        while t * step <= bx1:
            canvas.line(t * step, by0, t * step, by1, stroke="#cccccc", width=0.4)
            t += 1
        t = math.floor(by0 / step)
        while t * step <= by1:
            canvas.line(bx0, t * step, bx1, t * step, stroke="#cccccc", width=0.4)
            t += 1
        for poly in fam.region.polys:
            canvas.polygon(list(poly.verts))
        canvas.frame()
        rep.value("hexagons", len(fam.region.polys))
        rep.check("hexagon count", len(fam.region.polys), "==", 1 << spec.k)
    else:  # argparse choices prevent this
        raise UsageError(f"unknown render target {args.target!r}")

    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(canvas.to_xml())
    rep.value("written", str(out))
    return rep


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="kakeyalab", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", metavar="subcommand")

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", type=Path, default=None,
                       help="directory for JSON/CSV artifacts")
        p.add_argument("--format", default="json",
                       help="comma list of artifact formats: json,csv")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for independent cells")

    p = sub.add_parser("seq", help="sequence blocks and the index bound")
    p.add_argument("--m-hi", type=int, default=10)
    common(p)
    p.set_defaults(handler=cmd_seq)

    p = sub.add_parser("lemma2", help="exact strip-region areas and containment")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--xhat", type=dyadic, default=None)
    p.add_argument("--k-override", type=int, default=None)
    p.add_argument("--grid", action="store_true",
                   help="run the preset anchor grid instead of one cell")
    p.add_argument("--big", action="store_true",
                   help="lift the desk-scale preset restrictions")
    common(p)
    p.set_defaults(handler=cmd_lemma2)

    p = sub.add_parser("theorem1", help="open-set martingale stabilization trace")
    p.add_argument("--region", choices=["half", "unit", "piece"], default="half")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--xhat", type=dyadic, default=None)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--point", type=point, default=(Fraction(1, 4), Fraction(1, 4)))
    p.add_argument("--r-max", type=int, default=8)
    common(p)
    p.set_defaults(handler=cmd_theorem1)

    p = sub.add_parser("lemma4", help="averaged-martingale threshold trace")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--i", type=int, default=None,
                   help="optional; must match the folded point")
    p.add_argument("--j", type=int, default=None,
                   help="optional; must match the folded point")
    p.add_argument("--slope", type=rational, required=True)
    p.add_argument("--x", type=rational, required=True)
    p.add_argument("--r-max", type=int, default=12)
    common(p)
    p.set_defaults(handler=cmd_lemma4)

    p = sub.add_parser("success-trend", help="master-martingale layer floors")
    p.add_argument("--slope", type=rational, default=Fraction(0))
    p.add_argument("--x", type=rational, default=Fraction(1, 4))
    p.add_argument("--m-max", type=int_list, default=[1, 2])
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--r-max", type=int, default=10)
    common(p)
    p.set_defaults(handler=cmd_success_trend)

    p = sub.add_parser("martingale-check", help="exhaustive averaging identity")
    p.add_argument("spec", choices=["open-half", "open-unit", "averaged", "master"])
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--r-max", type=int, default=4)
    common(p)
    p.set_defaults(handler=cmd_martingale_check)

    p = sub.add_parser("render", help="SVG figures and region drawings")
    p.add_argument("target", choices=["figure1", "figure2", "region"])
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--xhat", type=dyadic, default=None)
    p.add_argument("--k-override", type=int, default=None)
    p.add_argument("--grid", type=int, default=3,
                   help="dyadic overlay level for region targets")
    p.add_argument("--out", type=Path, default=Path("figure.svg"))
    p.set_defaults(handler=cmd_render)

    return parser


def _emit(report: Report, args) -> None:
    print(report.to_text())
    out = getattr(args, "out", None)
    if out is None or report.command == "render":
        return
    formats = {f.strip() for f in getattr(args, "format", "json").split(",") if f.strip()}
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if "json" in formats:
        (out / f"{report.command}.json").write_text(report.json_text())
    if "csv" in formats:
        for table in report.tables:
            (out / f"{report.command}_{table.name}.csv").write_text(table.to_csv())


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "handler", None) is None:
        parser.error("a subcommand is required")
    t0 = time.perf_counter()
    try:
        report = args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    report.runtime_ms = int((time.perf_counter() - t0) * 1000)
    _emit(report, args)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
