"""Exact 2-D measure for finite unions of convex polygons.

All coordinates are rationals.  The union-area routines use a vertical
slab sweep: breakpoints are placed at every vertex, every crossing of two
polygon edges, and every crossing of an edge with a requested horizontal
cut line.  Between consecutive breakpoints each polygon meets a vertical
line in an interval whose endpoints are linear in x and whose relative
order is constant, so the union length is linear there and one exact
evaluation at the slab midpoint gives the slab's exact area.

Large inputs are first partitioned into buckets (columns, then bands) so
the per-slab active set stays small; bucketing only ever splits polygons
along vertical or horizontal lines, which preserves total area exactly.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import gcd, lcm

from .numeric import Rat, parse_rat, rat_str

Pt = tuple[Rat, Rat]
# Axis-aligned rectangle as (x0, y0, x1, y1) with x0 <= x1, y0 <= y1.
Rect = tuple[Rat, Rat, Rat, Rat]

__all__ = [
    "Pt",
    "Rect",
    "ConvexPoly",
    "Region",
    "poly_area",
    "convex_hull",
    "clip_poly_rect",
    "clip_poly_halfplane",
    "union_area",
    "union_area_in_rect",
    "union_area_grid",
    "sweep_context",
    "sweep_column",
    "contains_point",
]


def _signed_area2(pts: tuple[Pt, ...]) -> Rat:
    # Twice the signed area (shoelace); positive for counter-clockwise.
    s = Fraction(0)
    n = len(pts)
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s


def _canon(points) -> tuple[Pt, ...] | None:
    """Canonical CCW vertex tuple: no repeats, no collinear middles.

    Returns None when the input has no interior (fewer than 3 distinct
    vertices or zero area).
    """
    pts = [(Fraction(x), Fraction(y)) for x, y in points]
    out: list[Pt] = []
    for p in pts:
        if not out or p != out[-1]:
            out.append(p)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    if len(out) < 3:
        return None
    if _signed_area2(tuple(out)) < 0:
        out.reverse()
    # Drop vertices that sit on the segment between their neighbours.
    changed = True
    while changed and len(out) >= 3:
        changed = False
        for i in range(len(out)):
            a = out[i - 1]
            b = out[i]
            c = out[(i + 1) % len(out)]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= 0:
                # collinear or reflex; reflex cannot arise from half-plane
                # clipping of convex input, so treat both as removable only
                # when exactly collinear
                if cross == 0:
                    out.pop(i)
                    changed = True
                    break
                return None
    if len(out) < 3 or _signed_area2(tuple(out)) <= 0:
        return None
    return tuple(out)


@dataclass(frozen=True)
class ConvexPoly:
    """Strictly convex polygon, CCW vertex order, positive area."""

    verts: tuple[Pt, ...]

    def __post_init__(self) -> None:
        n = len(self.verts)
        if n < 3:
            raise ValueError("need at least 3 vertices")
        for i in range(n):
            a = self.verts[i - 1]
            b = self.verts[i]
            c = self.verts[(i + 1) % n]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= 0:
                raise ValueError("vertices not strictly convex CCW")

    @staticmethod
    def from_points(points) -> "ConvexPoly | None":
        pts = _canon(points)
        return None if pts is None else ConvexPoly(pts)

    def area(self) -> Rat:
        return _signed_area2(self.verts) / 2

    def bbox(self) -> Rect:
        xs = [p[0] for p in self.verts]
        ys = [p[1] for p in self.verts]
        return (min(xs), min(ys), max(xs), max(ys))

    def translate(self, dx: Rat, dy: Rat) -> "ConvexPoly":
        return ConvexPoly(tuple((x + dx, y + dy) for x, y in self.verts))

    def contains(self, pt: Pt, mode: str = "closed") -> bool:
        px, py = Fraction(pt[0]), Fraction(pt[1])
        n = len(self.verts)
        for i in range(n):
            x0, y0 = self.verts[i]
            x1, y1 = self.verts[(i + 1) % n]
            cross = (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0)
            if mode == "interior":
                if cross <= 0:
                    return False
            elif cross < 0:
                return False
        return True


def poly_area(poly: ConvexPoly) -> Rat:
    return poly.area()


def convex_hull(points) -> ConvexPoly | None:
    """Exact convex hull (monotone chain); None if the hull has no area."""
    pts = sorted({(Fraction(x), Fraction(y)) for x, y in points})
    if len(pts) < 3:
        return None

    def build(seq):
        chain: list[Pt] = []
        for p in seq:
            while len(chain) >= 2:
                a, b = chain[-2], chain[-1]
                if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) <= 0:
                    chain.pop()
                else:
                    break
            chain.append(p)
        return chain

    lower = build(pts)
    upper = build(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return ConvexPoly.from_points(hull) if len(hull) >= 3 else None


def clip_poly_halfplane(poly: ConvexPoly, a: Rat, b: Rat, c: Rat) -> ConvexPoly | None:
    """Clip to the half-plane a*x + b*y <= c (Sutherland-Hodgman step)."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    out: list[Pt] = []
    verts = poly.verts
    n = len(verts)
    for i in range(n):
        p = verts[i]
        q = verts[(i + 1) % n]
        fp = a * p[0] + b * p[1] - c
        fq = a * q[0] + b * q[1] - c
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return ConvexPoly.from_points(out) if len(out) >= 3 else None


def clip_poly_rect(poly: ConvexPoly, rect: Rect) -> ConvexPoly | None:
    x0, y0, x1, y1 = (Fraction(v) for v in rect)
    if x0 >= x1 or y0 >= y1:
        return None
    out: ConvexPoly | None = poly
    for a, b, c in ((-1, 0, -x0), (1, 0, x1), (0, -1, -y0), (0, 1, y1)):
        if out is None:
            return None
        out = clip_poly_halfplane(out, Fraction(a), Fraction(b), Fraction(c))
    return out


@dataclass(frozen=True)
class Region:
    """Finite union of convex polygons (overlaps allowed)."""

    polys: tuple[ConvexPoly, ...]

    @staticmethod
    def from_polys(polys) -> "Region":
        return Region(tuple(p for p in polys if p is not None))

    def is_empty(self) -> bool:
        return not self.polys

    def bbox(self) -> Rect | None:
        if not self.polys:
            return None
        boxes = [p.bbox() for p in self.polys]
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )

    def translate(self, dx: Rat, dy: Rat) -> "Region":
        dx, dy = Fraction(dx), Fraction(dy)
        return Region(tuple(p.translate(dx, dy) for p in self.polys))

    def clip_to_rect(self, rect: Rect) -> "Region":
        return Region.from_polys(clip_poly_rect(p, rect) for p in self.polys)

    def area(self) -> Rat:
        return union_area(self)

    def to_json(self) -> dict:
        return {
            "polys": [
                [[rat_str(x), rat_str(y)] for x, y in p.verts] for p in self.polys
            ]
        }

    @staticmethod
    def from_json(data: dict) -> "Region":
        polys = []
        for vert_list in data["polys"]:
            pts = [(parse_rat(x), parse_rat(y)) for x, y in vert_list]
            poly = ConvexPoly.from_points(pts)
            if poly is None:
                raise ValueError("degenerate polygon in serialised region")
            polys.append(poly)
        return Region(tuple(polys))


def contains_point(region: Region, pt: Pt, mode: str = "closed") -> bool:
    """Membership in the union.

    mode='closed' tests the closed polygons; mode='interior' requires the
    point to be strictly inside at least one member polygon (a sufficient
    condition for lying in the interior of the union).
    """
    if mode not in ("closed", "interior"):
        raise ValueError(f"bad mode {mode!r}")
    return any(p.contains(pt, mode) for p in region.polys)


# ---------------------------------------------------------------------------
# sweep kernel
# ---------------------------------------------------------------------------

# Tuning knobs for the bucketing pipeline.  Buckets are split until they
# hold at most BUCKET_MAX polygons (or the depth guard trips); the kernel
# cost per slab is linear in the bucket's active count.
BUCKET_MAX = 16
MAX_DEPTH = 48


def _scale_int(value: Fraction, scale: int) -> int:
    num = value.numerator * scale
    den = value.denominator
    q, r = divmod(num, den)
    if r:
        raise ValueError("scale does not clear denominators")
    return q


def _chains(verts_i: list[tuple[int, int]]):
    """Split scaled CCW vertices into bottom and top chains of non-vertical
    edges, each ordered left to right, as (X0, Y0, A, B, C, X1) tuples with
    B = X1-X0 > 0, A = Y1-Y0 and y(x) = (A*x + C)/B."""
    n = len(verts_i)
    lo = min(range(n), key=lambda i: verts_i[i])
    hi = max(range(n), key=lambda i: verts_i[i])
    bot = []
    i = lo
    while i != hi:
        j = (i + 1) % n
        (x0, y0), (x1, y1) = verts_i[i], verts_i[j]
        if x1 > x0:
            bot.append((x0, y0, y1 - y0, x1 - x0, y0 * (x1 - x0) - x0 * (y1 - y0), x1))
        i = j
    top = []
    i = hi
    while i != lo:
        j = (i + 1) % n
        (x1, y1), (x0, y0) = verts_i[i], verts_i[j]
        if x1 > x0:
            top.append((x0, y0, y1 - y0, x1 - x0, y0 * (x1 - x0) - x0 * (y1 - y0), x1))
        i = j
    top.reverse()
    return bot, top


def _sweep_bands(
    polys: list[ConvexPoly],
    x_lo: Fraction,
    x_hi: Fraction,
    y_cuts: list[Fraction],
    y_band: tuple[Fraction, Fraction] | None = None,
) -> list[Fraction]:
    """Exact union areas within [x_lo, x_hi] split by horizontal y_cuts.

    Returns len(y_cuts)+1 areas: below the first cut, between consecutive
    cuts, above the last.  Polygons may extend past the x-range; only the
    part inside is measured.  With y_band=(lo, hi), only the part of the
    union inside that horizontal band is counted (slices are clamped to it).
    """
    nbands = len(y_cuts) + 1
    if not polys or x_lo >= x_hi:
        return [Fraction(0)] * nbands

    dens = [x_lo.denominator, x_hi.denominator]
    for c in y_cuts:
        dens.append(c.denominator)
    if y_band is not None:
        dens.append(y_band[0].denominator)
        dens.append(y_band[1].denominator)
    for p in polys:
        for x, y in p.verts:
            dens.append(x.denominator)
            dens.append(y.denominator)
    scale = lcm(*dens) if len(dens) > 1 else dens[0]

    xl = _scale_int(x_lo, scale)
    xh = _scale_int(x_hi, scale)
    cuts_i = [_scale_int(c, scale) for c in y_cuts]
    cuts_f = [float(c) for c in cuts_i]
    band_i = None
    if y_band is not None:
        band_i = (_scale_int(y_band[0], scale), _scale_int(y_band[1], scale))

    items = []
    for p in polys:
        it = _scaled_item(p, scale)
        if it[0] < xh and it[1] > xl:
            items.append(it)
    if not items:
        return [Fraction(0)] * nbands

    accs = [Fraction(0)] * nbands
    _sweep_core(items, xl, xh, cuts_i, cuts_f, band_i, accs)
    s2 = Fraction(scale) * scale
    return [a / s2 for a in accs]


def _scaled_item(p: ConvexPoly, scale: int):
    """Scaled-integer sweep item [xmin, xmax, bot, top, ymin, ymax]."""
    vi = [(_scale_int(x, scale), _scale_int(y, scale)) for x, y in p.verts]
    xs = [v[0] for v in vi]
    ys = [v[1] for v in vi]
    bot, top = _chains(vi)
    return [min(xs), max(xs), bot, top, min(ys), max(ys)]


def _span_int(it, xl: int, xh: int) -> tuple[int, int]:
    """Conservative integer bounds on an item's y-extent over x in [xl, xh]
    (floor of the minimum, ceiling of the maximum)."""
    ax = it[0] if it[0] > xl else xl
    bx = it[1] if it[1] < xh else xh
    lo = hi = None
    for x0, y0, a, b, c, x1 in it[2]:
        if x1 <= ax or x0 >= bx:
            continue
        for x in (ax if x0 < ax else x0, bx if x1 > bx else x1):
            v = (a * x + c) // b
            if lo is None or v < lo:
                lo = v
    for x0, y0, a, b, c, x1 in it[3]:
        if x1 <= ax or x0 >= bx:
            continue
        for x in (ax if x0 < ax else x0, bx if x1 > bx else x1):
            v = -((-(a * x + c)) // b)
            if hi is None or v > hi:
                hi = v
    if lo is None or hi is None:
        # degenerate overlap (touching at a wall); contributes nothing
        return (0, 0)
    return (lo, hi)


def _sweep_core(items, xl, xh, cuts_i, cuts_f, band_i, accs) -> None:
    """Slab sweep over scaled-integer items, accumulating scaled areas.

    accs has len(cuts_i)+1 slots; with band_i=(lo, hi) only the union inside
    that horizontal band is counted.
    """
    # Breakpoints: bucket walls, vertices, edge-edge and edge-cut crossings.
    bps: set[Fraction] = {Fraction(xl), Fraction(xh)}

    def _add_bp(num: int, den: int) -> None:
        # only x strictly inside the bucket matters
        if den < 0:
            num, den = -num, -den
        if xl * den < num < xh * den:
            bps.add(Fraction(num, den))

    all_edges: list[list[tuple]] = []
    for it in items:
        edges = it[2] + it[3]
        all_edges.append(edges)
        for x0, y0, a, b, c, x1 in edges:
            if xl < x0 < xh:
                bps.add(Fraction(x0))
            if xl < x1 < xh:
                bps.add(Fraction(x1))
            if a != 0:
                lo_y, hi_y = (y0, y0 + a) if a > 0 else (y0 + a, y0)
                for yc in cuts_i:
                    if lo_y <= yc <= hi_y:
                        _add_bp(yc * b - c, a)
                if band_i is not None:
                    for yc in band_i:
                        if lo_y <= yc <= hi_y:
                            _add_bp(yc * b - c, a)
        # vertical cap vertices (not on any chain) still need breakpoints
        if xl < it[0] < xh:
            bps.add(Fraction(it[0]))
        if xl < it[1] < xh:
            bps.add(Fraction(it[1]))

    order = sorted(range(len(items)), key=lambda i: items[i][4])
    for oi in range(len(order)):
        i = order[oi]
        ymax_i = items[i][5]
        for oj in range(oi + 1, len(order)):
            j = order[oj]
            if items[j][4] > ymax_i:
                break
            if items[i][0] >= items[j][1] or items[j][0] >= items[i][1]:
                continue
            for e1 in all_edges[i]:
                for e2 in all_edges[j]:
                    s0 = e1[0] if e1[0] > e2[0] else e2[0]
                    s1 = e1[5] if e1[5] < e2[5] else e2[5]
                    if s0 >= s1:
                        continue
                    a1, b1, c1 = e1[2], e1[3], e1[4]
                    a2, b2, c2 = e2[2], e2[3], e2[4]
                    den = a1 * b2 - a2 * b1
                    if den == 0:
                        continue
                    num = c2 * b1 - c1 * b2
                    if den < 0:
                        num, den = -num, -den
                    if s0 * den < num < s1 * den:
                        _add_bp(num, den)

    xs_sorted = sorted(bps)
    items = sorted(items, key=lambda it: it[0])
    ptr = 0
    active: list[list] = []
    nitems = len(items)

    for si in range(len(xs_sorted) - 1):
        xa = xs_sorted[si]
        xb = xs_sorted[si + 1]
        xan, xad = xa.numerator, xa.denominator
        xbn, xbd = xb.numerator, xb.denominator
        # slab midpoint as a non-reduced integer pair; only used in products
        p = xan * xbd + xbn * xad
        q = 2 * xad * xbd
        while ptr < nitems and items[ptr][0] * xbd < xbn:
            active.append(items[ptr] + [0, 0])  # bot cursor, top cursor
            ptr += 1
        if not active:
            continue
        slices = []
        new_active = []
        for it in active:
            if it[1] * xad <= xan:
                continue
            new_active.append(it)
            if it[0] * q >= p or it[1] * q <= p:
                continue
            bot, top = it[2], it[3]
            bi, ti = it[6], it[7]
            while bot[bi][5] * q < p:
                bi += 1
            while top[ti][5] * q < p:
                ti += 1
            it[6], it[7] = bi, ti
            e = bot[bi]
            lon = e[2] * p + e[4] * q
            lod = e[3] * q
            e = top[ti]
            hin = e[2] * p + e[4] * q
            hid = e[3] * q
            if band_i is not None:
                if lon < band_i[0] * lod:
                    lon, lod = band_i[0], 1
                if hin > band_i[1] * hid:
                    hin, hid = band_i[1], 1
                if hin * lod <= lon * hid:
                    continue
            slices.append((lon / lod, lon, lod, hin, hid))
        active = new_active
        if not slices:
            continue
        slices.sort()
        # float keys can misorder near-equal values; verify and repair
        ok = True
        for i in range(len(slices) - 1):
            if slices[i][1] * slices[i + 1][2] > slices[i + 1][1] * slices[i][2]:
                ok = False
                break
        if not ok:
            slices.sort(
                key=cmp_to_key(
                    lambda s, t: -1 if s[1] * t[2] < t[1] * s[2] else (0 if s[1] * t[2] == t[1] * s[2] else 1)
                )
            )
        width = xb - xa
        # merge into runs and split across bands
        run_ln = run_ld = run_hn = run_hd = None
        for _, ln, ld, hn, hd in slices:
            if run_ln is None:
                run_ln, run_ld, run_hn, run_hd = ln, ld, hn, hd
                continue
            if ln * run_hd <= run_hn * ld:
                if hn * run_hd > run_hn * hd:
                    run_hn, run_hd = hn, hd
            else:
                _flush_run(accs, cuts_i, cuts_f, run_ln, run_ld, run_hn, run_hd, width)
                run_ln, run_ld, run_hn, run_hd = ln, ld, hn, hd
        if run_ln is not None:
            _flush_run(accs, cuts_i, cuts_f, run_ln, run_ld, run_hn, run_hd, width)


def _flush_run(accs, cuts_i, cuts_f, ln, ld, hn, hd, width) -> None:
    # Accumulate width * |run ∩ band| for each horizontal band.
    if not cuts_i:
        accs[0] += width * (Fraction(hn, hd) - Fraction(ln, ld))
        return
    lo_f = ln / ld
    idx = bisect_left(cuts_f, lo_f)
    # exact adjustment around the float guess
    while idx > 0 and cuts_i[idx - 1] * ld >= ln:
        idx -= 1
    ncuts = len(cuts_i)
    while idx < ncuts and cuts_i[idx] * ld < ln:
        idx += 1
    cur_n, cur_d = ln, ld
    while idx < ncuts and cuts_i[idx] * hd < hn:
        c = cuts_i[idx]
        accs[idx] += width * (Fraction(c) - Fraction(cur_n, cur_d))
        cur_n, cur_d = c, 1
        idx += 1
    accs[idx] += width * (Fraction(hn, hd) - Fraction(cur_n, cur_d))


def _sweep_flat(flats, xl, xh, blo, bhi, cuts_i, cuts_f, accs) -> None:
    """Slab sweep specialized for items whose lower and upper bounds are each
    a single line across the whole column (no interior chain kinks).

    flats entries are (x0, x1, la, lb, lc, ha, hb, hc) in scaled integers with
    lower bound (la*x + lc)/lb and upper bound (ha*x + hc)/hb, lb, hb > 0.
    Counts only the union inside the horizontal band [blo, bhi].
    """
    # one shared bound denominator makes every slice a plain integer pair and
    # cancels out of crossing abscissas; columns of a common family share it
    # already, so the lcm stays small
    bstar = 1
    for f in flats:
        b = f[3]
        if bstar % b:
            bstar = bstar // gcd(bstar, b) * b
        b = f[6]
        if bstar % b:
            bstar = bstar // gcd(bstar, b) * b
    if bstar.bit_length() > 96:
        _sweep_flat_mixed(flats, xl, xh, blo, bhi, cuts_i, cuts_f, accs)
        return
    norm = []
    full_span = True
    for x0, x1, la, lb, lc, ha, hb, hc in flats:
        if x0 > xl or x1 < xh:
            full_span = False
        if lb == bstar and hb == bstar:
            norm.append((x0, x1, la, lc, ha, hc))
        else:
            fl = bstar // lb
            fh = bstar // hb
            norm.append((x0, x1, la * fl, lc * fl, ha * fh, hc * fh))

    # breakpoints as num/den pairs, den > 0: walls, item ends, and every
    # crossing that can change slice order, band clamping, or cut splitting
    bn = [xl, xh]
    bd = [1, 1]
    app_n = bn.append
    app_d = bd.append
    lo_t = blo * bstar
    hi_t = bhi * bstar
    for x0, x1, la, lc, ha, hc in norm:
        if full_span:
            s0, s1 = xl, xh
        else:
            if xl < x0 < xh:
                app_n(x0)
                app_d(1)
            if xl < x1 < xh:
                app_n(x1)
                app_d(1)
            s0 = x0 if x0 > xl else xl
            s1 = x1 if x1 < xh else xh
            if s0 >= s1:
                continue
        for a, c in ((la, lc), (ha, hc)):
            if a == 0:
                continue
            v0 = a * s0 + c
            v1 = a * s1 + c
            for t in (lo_t, hi_t):
                if (v0 - t) * (v1 - t) < 0:
                    nu, de = t - c, a
                    if de < 0:
                        nu, de = -nu, -de
                    app_n(nu)
                    app_d(de)
            for yc in cuts_i:
                if yc < blo or yc > bhi:
                    continue
                t = yc * bstar
                if (v0 - t) * (v1 - t) < 0:
                    nu, de = t - c, a
                    if de < 0:
                        nu, de = -nu, -de
                    app_n(nu)
                    app_d(de)
    nf = len(norm)
    for i in range(nf):
        x0i, x1i, lai, lci, hai, hci = norm[i]
        lines_i = ((lai, lci), (hai, hci))
        for j in range(i + 1, nf):
            fj = norm[j]
            if full_span:
                s0, s1 = xl, xh
            else:
                s0 = x0i if x0i > fj[0] else fj[0]
                s1 = x1i if x1i < fj[1] else fj[1]
                if s0 < xl:
                    s0 = xl
                if s1 > xh:
                    s1 = xh
                if s0 >= s1:
                    continue
            for a1, c1 in lines_i:
                for a2, c2 in ((fj[2], fj[3]), (fj[4], fj[5])):
                    den = a1 - a2
                    if den == 0:
                        continue
                    num = c2 - c1
                    if den < 0:
                        num, den = -num, -den
                    if s0 * den < num < s1 * den:
                        # a crossing outside the band cannot change in-band
                        # slice order: both bounds sit clamped on its edge
                        t = a1 * num + c1 * den
                        if lo_t * den < t < hi_t * den:
                            app_n(num)
                            app_d(den)

    pts = sorted(zip(bn, bd), key=lambda t: t[0] / t[1])
    ok = True
    for i in range(len(pts) - 1):
        if pts[i][0] * pts[i + 1][1] > pts[i + 1][0] * pts[i][1]:
            ok = False
            break
    if not ok:
        pts.sort(key=lambda t: Fraction(t[0], t[1]))
    xs: list[tuple[int, int]] = []
    for nu, de in pts:
        if xs and nu * xs[-1][1] == xs[-1][0] * de:
            continue
        xs.append((nu, de))

    no_cuts = not cuts_i
    # integer-walled slabs share denominator 2*bstar; others stay fractions
    tot_i = 0
    tot_f = None
    for si in range(len(xs) - 1):
        pn, pd = xs[si]
        qn, qd = xs[si + 1]
        # slab midpoint as a non-reduced integer pair; only used in products
        whole = pd == 1 and qd == 1
        if whole:
            p = pn + qn
            q = 2
        else:
            p = pn * qd + qn * pd
            q = 2 * pd * qd
        bq = bstar * q
        blo_s = blo * bq
        bhi_s = bhi * bq
        slices = []
        ap = slices.append
        if full_span:
            for x0, x1, la, lc, ha, hc in norm:
                lon = la * p + lc * q
                if lon < blo_s:
                    lon = blo_s
                hin = ha * p + hc * q
                if hin > bhi_s:
                    hin = bhi_s
                if hin <= lon:
                    continue
                ap((lon, hin))
        else:
            for x0, x1, la, lc, ha, hc in norm:
                if x0 * q >= p or x1 * q <= p:
                    continue
                lon = la * p + lc * q
                if lon < blo_s:
                    lon = blo_s
                hin = ha * p + hc * q
                if hin > bhi_s:
                    hin = bhi_s
                if hin <= lon:
                    continue
                ap((lon, hin))
        if not slices:
            continue
        slices.sort()
        run_l, run_h = slices[0]
        if no_cuts:
            acc = 0
            for ln, hn in slices:
                if ln <= run_h:
                    if hn > run_h:
                        run_h = hn
                else:
                    acc += run_h - run_l
                    run_l, run_h = ln, hn
            acc += run_h - run_l
            if whole:
                tot_i += (qn - pn) * acc
            else:
                part = Fraction((qn * pd - pn * qd) * acc, pd * qd * bq)
                tot_f = part if tot_f is None else tot_f + part
        else:
            width = Fraction(qn * pd - pn * qd, pd * qd)
            for ln, hn in slices:
                if ln <= run_h:
                    if hn > run_h:
                        run_h = hn
                else:
                    _flush_run(accs, cuts_i, cuts_f, run_l, bq, run_h, bq, width)
                    run_l, run_h = ln, hn
            _flush_run(accs, cuts_i, cuts_f, run_l, bq, run_h, bq, width)
    if no_cuts:
        total = Fraction(tot_i, 2 * bstar) if tot_i else Fraction(0)
        if tot_f is not None:
            total += tot_f
        if total:
            accs[0] += total


def _sweep_flat_mixed(flats, xl, xh, blo, bhi, cuts_i, cuts_f, accs) -> None:
    """Flat-item sweep for bound denominators sharing no small lcm."""
    bn = [xl, xh]
    bd = [1, 1]
    app_n = bn.append
    app_d = bd.append
    for f in flats:
        x0, x1, la, lb, lc, ha, hb, hc = f
        if xl < x0 < xh:
            app_n(x0)
            app_d(1)
        if xl < x1 < xh:
            app_n(x1)
            app_d(1)
        s0 = x0 if x0 > xl else xl
        s1 = x1 if x1 < xh else xh
        if s0 >= s1:
            continue
        for a, b, c in ((la, lb, lc), (ha, hb, hc)):
            if a == 0:
                continue
            v0 = a * s0 + c
            v1 = a * s1 + c
            for yc in (blo, bhi):
                t = yc * b
                if (v0 - t) * (v1 - t) < 0:
                    nu, de = t - c, a
                    if de < 0:
                        nu, de = -nu, -de
                    app_n(nu)
                    app_d(de)
            for yc in cuts_i:
                t = yc * b
                if (v0 - t) * (v1 - t) < 0:
                    nu, de = t - c, a
                    if de < 0:
                        nu, de = -nu, -de
                    app_n(nu)
                    app_d(de)
    nf = len(flats)
    for i in range(nf):
        fi = flats[i]
        fix0, fix1 = fi[0], fi[1]
        for j in range(i + 1, nf):
            fj = flats[j]
            s0 = fix0 if fix0 > fj[0] else fj[0]
            s1 = fix1 if fix1 < fj[1] else fj[1]
            if s0 < xl:
                s0 = xl
            if s1 > xh:
                s1 = xh
            if s0 >= s1:
                continue
            for a1, b1, c1 in ((fi[2], fi[3], fi[4]), (fi[5], fi[6], fi[7])):
                for a2, b2, c2 in ((fj[2], fj[3], fj[4]), (fj[5], fj[6], fj[7])):
                    den = a1 * b2 - a2 * b1
                    if den == 0:
                        continue
                    num = c2 * b1 - c1 * b2
                    if den < 0:
                        num, den = -num, -den
                    if s0 * den < num < s1 * den:
                        app_n(num)
                        app_d(den)

    pts = sorted(zip(bn, bd), key=lambda t: t[0] / t[1])
    ok = True
    for i in range(len(pts) - 1):
        if pts[i][0] * pts[i + 1][1] > pts[i + 1][0] * pts[i][1]:
            ok = False
            break
    if not ok:
        pts.sort(key=lambda t: Fraction(t[0], t[1]))
    xs: list[tuple[int, int]] = []
    for nu, de in pts:
        if xs and nu * xs[-1][1] == xs[-1][0] * de:
            continue
        xs.append((nu, de))

    no_cuts = not cuts_i
    total = Fraction(0)
    for si in range(len(xs) - 1):
        pn, pd = xs[si]
        qn, qd = xs[si + 1]
        p = pn * qd + qn * pd
        q = 2 * pd * qd
        slices = []
        ap = slices.append
        for x0, x1, la, lb, lc, ha, hb, hc in flats:
            if x0 * q >= p or x1 * q <= p:
                continue
            lon = la * p + lc * q
            lod = lb * q
            hin = ha * p + hc * q
            hid = hb * q
            if lon < blo * lod:
                lon, lod = blo, 1
            if hin > bhi * hid:
                hin, hid = bhi, 1
            if hin * lod <= lon * hid:
                continue
            ap((lon / lod, lon, lod, hin, hid))
        if not slices:
            continue
        if len(slices) > 1:
            slices.sort()
            # float keys can misorder near-equal values; verify and repair
            ok = True
            for i in range(len(slices) - 1):
                if slices[i][1] * slices[i + 1][2] > slices[i + 1][1] * slices[i][2]:
                    ok = False
                    break
            if not ok:
                slices.sort(
                    key=cmp_to_key(
                        lambda s, t: -1 if s[1] * t[2] < t[1] * s[2] else (0 if s[1] * t[2] == t[1] * s[2] else 1)
                    )
                )
        width = Fraction(qn * pd - pn * qd, pd * qd)
        run_ln = run_ld = run_hn = run_hd = None
        for _, ln, ld, hn, hd in slices:
            if run_ln is None:
                run_ln, run_ld, run_hn, run_hd = ln, ld, hn, hd
            elif ln * run_hd <= run_hn * ld:
                if hn * run_hd > run_hn * hd:
                    run_hn, run_hd = hn, hd
            else:
                if no_cuts:
                    total += width * (Fraction(run_hn, run_hd) - Fraction(run_ln, run_ld))
                else:
                    _flush_run(accs, cuts_i, cuts_f, run_ln, run_ld, run_hn, run_hd, width)
                run_ln, run_ld, run_hn, run_hd = ln, ld, hn, hd
        if run_ln is not None:
            if no_cuts:
                total += width * (Fraction(run_hn, run_hd) - Fraction(run_ln, run_ld))
            else:
                _flush_run(accs, cuts_i, cuts_f, run_ln, run_ld, run_hn, run_hd, width)
    if no_cuts:
        accs[0] += total


# ---------------------------------------------------------------------------
# bucketing pipeline
# ---------------------------------------------------------------------------

# halving a column stops once splits without substantial shrink exhaust this
X_BUDGET = 1
# a split counts as progress only when the largest child group loses at
# least this fraction of the parent group
SHRINK = 8
# forced horizontal splits of a dense stack get a short depth budget
FORCE_DEPTH = 12


def _y_span_in_slab(fv, fx0: float, fx1: float) -> tuple[float, float]:
    """Conservative float [lo, hi] covering a float vertex loop's y-extent
    over x in [fx0, fx1].

    Used only to decide which polygons to sweep together; the span is widened
    outward so grouping can merge too much but never separates overlapping
    polygons.
    """
    lo = hi = None
    n = len(fv)
    for e in range(n):
        fax, fay = fv[e]
        fbx, fby = fv[e + 1 - n]
        if fax > fbx:
            fax, fbx, fay, fby = fbx, fax, fby, fay
        if fbx < fx0 or fax > fx1:
            continue
        if fax == fbx:
            cand = (fay, fby)
        else:
            t = (fby - fay) / (fbx - fax)
            cand = tuple(fay + t * (max(fax, min(x, fbx)) - fax) for x in (fx0, fx1))
        for y in cand:
            if lo is None or y < lo:
                lo = y
            if hi is None or y > hi:
                hi = y
    if lo is None:
        return (0.0, 0.0)
    pad = 1e-9 + 1e-9 * (abs(lo) + abs(hi))
    return (lo - pad, hi + pad)


def _gap_groups(
    items: list[tuple[float, float, int]],
) -> list[list[tuple[float, float, int]]]:
    """Chain (lo, hi, tag) spans into maximal overlapping runs."""
    items = sorted(items)
    groups: list[list[tuple[float, float, int]]] = []
    cur: list[tuple[float, float, int]] = []
    cur_top = 0.0
    for it in items:
        if cur and it[0] >= cur_top:
            groups.append(cur)
            cur = []
        cur.append(it)
        cur_top = it[1] if len(cur) == 1 else max(cur_top, it[1])
    if cur:
        groups.append(cur)
    return groups


def _grid_areas(
    polys: list[ConvexPoly],
    x_cuts: list[Fraction],
    y_cuts: list[Fraction],
    pruner=None,
) -> dict[tuple[int, int], Fraction]:
    """Union areas per grid cell.

    Cell (i, j) is the region between x_cuts[i-1]..x_cuts[i] and
    y_cuts[j-1]..y_cuts[j], with the outermost cells unbounded (index 0 and
    len(cuts)).  `pruner(indices, x0, x1) -> indices` may drop polygons
    whose column restriction is covered by the survivors; it is applied per
    column and must be exact.
    """
    out: dict[tuple[int, int], Fraction] = {}
    if not polys:
        return out

    ctx = sweep_context(polys, y_cuts)
    ctx.pruner = pruner
    boxes = ctx.boxes
    gx0 = min(b[0] for b in boxes)
    gx1 = max(b[2] for b in boxes)
    if gx0 >= gx1:
        return out
    ctx.min_width = (gx1 - gx0) / (1 << 24)
    out = ctx.out

    # initial columns: global extent split at the mandatory x cuts
    walls = [gx0] + [c for c in x_cuts if gx0 < c < gx1] + [gx1]
    col_index_of_wall: list[int] = []
    ci = 0
    for w in walls[:-1]:
        while ci < len(x_cuts) and x_cuts[ci] <= w:
            ci += 1
        col_index_of_wall.append(ci)

    for wi in range(len(walls) - 1):
        cx0, cx1 = walls[wi], walls[wi + 1]
        col = col_index_of_wall[wi]
        idxs = [i for i in range(len(polys)) if boxes[i][0] < cx1 and boxes[i][2] > cx0]
        _refine_column(ctx, idxs, cx0, cx1, col, len(idxs) + 1, X_BUDGET, 0)
    return {k: v for k, v in out.items() if v != 0}


class _SweepCtx:
    """Shared state for one grid computation (read-mostly; out accumulates)."""

    __slots__ = (
        "polys", "boxes", "fverts", "y_cuts", "out", "pruner", "min_width",
        "fam_scale", "cache",
    )


def sweep_context(polys, y_cuts: list[Rat]) -> _SweepCtx:
    """Reusable state for exact column sweeps over a fixed polygon list.

    `sweep_column` accumulates cell areas into `.out`, keyed (column index,
    row index) with rows cut at `y_cuts`.
    """
    ctx = _SweepCtx()
    ctx.polys = list(polys)
    ctx.boxes = [p.bbox() for p in ctx.polys]
    ctx.fverts = [tuple((float(x), float(y)) for x, y in p.verts) for p in ctx.polys]
    ctx.y_cuts = [Fraction(c) for c in y_cuts]
    ctx.out = {}
    ctx.pruner = None
    ctx.min_width = Fraction(0)
    dens = [c.denominator for c in ctx.y_cuts]
    for p in ctx.polys:
        for x, y in p.verts:
            dens.append(x.denominator)
            dens.append(y.denominator)
    ctx.fam_scale = lcm(*dens) if dens else 1
    ctx.cache = {}
    return ctx


def sweep_column(ctx: _SweepCtx, ids: list[int], x0: Rat, x1: Rat, col: int) -> None:
    """Exactly sweep the polygons `ids` restricted to the column [x0, x1]."""
    _stack_bands(ctx, ids, Fraction(x0), Fraction(x1), col)


def _refine_column(ctx, ids, x0, x1, col, parent_size, budget, depth) -> None:
    """Recursively narrow a column until its stacks are small enough to sweep.

    Halving a column only helps when it lets vertically separated groups
    emerge; `budget` counts consecutive splits that failed to shrink the
    largest group, so a stack that never separates (a fan of tubes through a
    common point) is swept directly instead of split forever.
    """
    if not ids:
        return
    width = x1 - x0
    pruner = ctx.pruner
    # optional pruner hints: no point pruning very wide columns, and splits
    # down to the leaf width always pay off for full-span families
    active_w = getattr(pruner, "active_width", None)
    leaf_w = getattr(pruner, "leaf_width", None)
    if pruner is not None and len(ids) > 16 and (active_w is None or width <= active_w):
        ids = pruner(ids, x0, x1)
    coarse = leaf_w is not None and width > leaf_w
    if coarse and len(ids) > BUCKET_MAX:
        groups = [ids]
    else:
        fx0, fx1 = float(x0), float(x1)
        fverts = ctx.fverts
        spans = [(*_y_span_in_slab(fverts[i], fx0, fx1), i) for i in ids]
        groups = [[i for _, _, i in grp] for grp in _gap_groups(spans)]
    boxes = ctx.boxes
    for g in groups:
        if len(g) > BUCKET_MAX and depth < MAX_DEPTH and width > ctx.min_width:
            if coarse:
                nb = X_BUDGET
            else:
                nb = X_BUDGET if len(g) <= parent_size - parent_size // SHRINK else budget - 1
            if nb >= 0:
                xm = (x0 + x1) / 2
                left = [i for i in g if boxes[i][0] < xm]
                right = [i for i in g if boxes[i][2] > xm]
                _refine_column(ctx, left, x0, xm, col, len(g), nb, depth + 1)
                _refine_column(ctx, right, xm, x1, col, len(g), nb, depth + 1)
                continue
        _stack_bands(ctx, g, x0, x1, col)


def _stack_bands(ctx, ids, x0, x1, col) -> None:
    """Sweep a column's stack, accumulating per-cell areas.

    Separates vertically disjoint sub-stacks by exact integer spans, then
    recursively halves oversized groups into horizontal bands.  Members are
    listed per band and clamped to it during the sweep, so band areas add
    exactly without clipping any geometry.
    """
    if not ids:
        return
    y_cuts = ctx.y_cuts
    scale = lcm(ctx.fam_scale, x0.denominator, x1.denominator)
    xl = _scale_int(x0, scale)
    xh = _scale_int(x1, scale)
    cuts_i = [_scale_int(c, scale) for c in y_cuts]
    cuts_f = [float(c) for c in cuts_i]

    cache = ctx.cache
    polys = ctx.polys
    items = []
    spans = []
    for i in ids:
        key = (i, scale)
        it = cache.get(key)
        if it is None:
            it = _scaled_item(polys[i], scale)
            cache[key] = it
        if it[0] >= xh or it[1] <= xl:
            continue
        spans.append(_span_int(it, xl, xh))
        items.append(it)
    if not items:
        return

    # with no chain kink strictly inside the column every bound is one line,
    # admitting a flat sweep without per-slab cursor bookkeeping
    flats: list[tuple] | None = []
    for it in items:
        bot = [e for e in it[2] if e[0] < xh and e[5] > xl]
        top = [e for e in it[3] if e[0] < xh and e[5] > xl]
        if len(bot) == 1 and len(top) == 1:
            eb, et = bot[0], top[0]
            flats.append((it[0], it[1], eb[2], eb[3], eb[4], et[2], et[3], et[4]))
        else:
            flats = None
            break

    accs = [Fraction(0)] * (len(y_cuts) + 1)

    def rec(idxs: list[int], blo: int, bhi: int, depth: int) -> None:
        if len(idxs) > BUCKET_MAX and depth < FORCE_DEPTH:
            glo = max(blo, min(spans[i][0] for i in idxs))
            ghi = min(bhi, max(spans[i][1] for i in idxs))
            ym = (glo + ghi) // 2
            below = [i for i in idxs if spans[i][0] < ym]
            above = [i for i in idxs if spans[i][1] > ym]
            straddle = len(below) + len(above) - len(idxs)
            if (
                len(below) < len(idxs)
                and len(above) < len(idxs)
                and straddle <= max(4, len(idxs) // 8)
            ):
                rec(below, blo, ym, depth + 1)
                rec(above, ym, bhi, depth + 1)
                return
        if flats is not None:
            _sweep_flat([flats[i] for i in idxs], xl, xh, blo, bhi, cuts_i, cuts_f, accs)
        else:
            _sweep_core([items[i] for i in idxs], xl, xh, cuts_i, cuts_f, (blo, bhi), accs)

    for grp in _gap_groups([(spans[i][0], spans[i][1], i) for i in range(len(items))]):
        g = [i for _, _, i in grp]
        glo = min(lo for lo, _, _ in grp)
        ghi = max(hi for _, hi, _ in grp)
        rec(g, glo - 1, ghi + 1, 0)

    s2 = Fraction(scale) * scale
    out = ctx.out
    for bi, area in enumerate(accs):
        if area:
            key = (col, bi)
            out[key] = out.get(key, Fraction(0)) + area / s2


def union_area(region: Region) -> Rat:
    cells = _grid_areas(list(region.polys), [], [])
    return sum(cells.values(), Fraction(0))


def union_area_in_rect(region: Region, rect: Rect) -> Rat:
    clipped = region.clip_to_rect(rect)
    return union_area(clipped)


def union_area_grid(
    region: Region,
    x_cuts: list[Rat],
    y_cuts: list[Rat],
    pruner=None,
) -> dict[tuple[int, int], Rat]:
    """Exact union area in every cell of the grid induced by the cut lines.

    Returns a sparse dict; missing cells have area zero.  Cell (i, j) lies
    between x_cuts[i-1] and x_cuts[i] (outer cells unbounded).
    """
    xs = sorted({Fraction(c) for c in x_cuts})
    ys = sorted({Fraction(c) for c in y_cuts})
    return _grid_areas(list(region.polys), xs, ys, pruner=pruner)
