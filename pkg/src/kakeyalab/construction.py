"""Line families with sequence-driven intercepts, and their tube regions.

For a slope a in [0, 1) the intercept after k refinement steps is

    b_k(a) = sum_{n=1..k} (x_{n-1} - x_n) * (a - 2**-n * floor(2**n * a)),

where x_n is the levelled sequence from `sequence`.  The k-th family has
one line per slope in the k-dyadic grid; tube regions are closed
sup-norm delta-neighbourhoods of those lines restricted to a vertical
strip, and pieces are their unit-square translates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .numeric import Dyadic, Rat, is_dyadic
from .region import (
    ConvexPoly,
    Rect,
    Region,
    clip_poly_rect,
    convex_hull,
    sweep_column,
    sweep_context,
    union_area_grid,
)
from .sequence import index_of, level_of_index, step, x_at

__all__ = [
    "Line",
    "PrecursorSpec",
    "FoldedPoint",
    "CapExceeded",
    "b_k",
    "b_exact",
    "intercept_grid",
    "lines_of_Fk",
    "tube_hexagon",
    "precursor_region",
    "translated_piece",
    "fold_point",
    "TubeFamily",
    "precursor_family",
    "piece_family",
    "family_grid_areas",
]

# largest tube count any single region may hold unless the caller raises it
DEFAULT_MAX_TUBES = 1 << 16

# column halving in family_grid_areas: consecutive splits that fail to shrink
# the survivor stack by 1/PRUNE_SHRINK exhaust PRUNE_BUDGET and force a sweep
PRUNE_BUDGET = 1
PRUNE_SHRINK = 8


class CapExceeded(RuntimeError):
    """A requested construction would exceed a configured resource cap."""


@dataclass(frozen=True)
class Line:
    slope: Rat
    intercept: Rat

    def y(self, x: Rat) -> Rat:
        return self.slope * x + self.intercept


@dataclass(frozen=True)
class PrecursorSpec:
    """Parameters of one tube union: strip [xhat, xhat + 2**-m), family
    index k, tube half-width delta = 2**(1-m-k)."""

    m: int
    xhat: Dyadic
    k: int
    delta: Rat
    coupled: bool  # k is exactly the sequence index of xhat in block m

    @staticmethod
    def resolve(
        m: int,
        xhat: Dyadic,
        k_override: int | None = None,
        k_cap: int | None = None,
    ) -> "PrecursorSpec":
        """Choose k for (m, xhat): the sequence index of xhat in block m,
        unless overridden or clamped by k_cap (the clamp keeps huge families
        out of reach while preserving every identity checked downstream)."""
        coupled_k = index_of(m, xhat).k
        k = coupled_k if k_override is None else k_override
        if k_cap is not None and k > k_cap:
            k = k_cap
        if k < 0:
            raise ValueError("k must be >= 0")
        delta = Fraction(2) ** (1 - m - k)
        return PrecursorSpec(m, xhat, k, delta, k == coupled_k)

    def strip(self) -> tuple[Rat, Rat]:
        x0 = self.xhat.to_rat()
        return x0, x0 + Fraction(1, 1 << self.m)


@dataclass(frozen=True)
class FoldedPoint:
    point: tuple[Rat, Rat]  # in [0,1) x [0,1)
    i: int
    j: int


def fold_point(x: Rat, y: Rat) -> FoldedPoint:
    x, y = Fraction(x), Fraction(y)
    i = x.numerator // x.denominator
    j = y.numerator // y.denominator
    return FoldedPoint((x - i, y - j), i, j)


def b_k(k: int, a: Rat) -> Rat:
    """Intercept after k steps (reference implementation)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    a = Fraction(a)
    total = Fraction(0)
    for n in range(1, k + 1):
        scaled = a * (1 << n)
        saw = a - Fraction(scaled.numerator // scaled.denominator, 1 << n)
        if saw:
            total += step(n).to_rat() * saw
    return total


def b_exact(a: Rat) -> Rat:
    """Limit intercept for a dyadic slope: b_k(a) is constant once 2**k
    clears a's denominator."""
    a = Fraction(a)
    if not is_dyadic(a):
        raise ValueError(f"slope {a} is not dyadic")
    return b_k(a.denominator.bit_length() - 1, a)


def intercept_grid(k: int) -> list[Rat]:
    """b_k at every slope q * 2**-k, q = 0 .. 2**k - 1.

    Integer form: b_k(q/2**k) = 2**-k * sum_n s_n * (q mod 2**(k-n)) with
    s_n = x_{n-1} - x_n scaled to a common power of two.
    """
    if k == 0:
        return [Fraction(0)]
    lev = level_of_index(k)
    steps = []
    for n in range(1, k + 1):
        s = step(n)
        steps.append((s.mantissa << (lev - s.exponent), (1 << (k - n)) - 1))
    shift = k + lev
    out = []
    for q in range(1 << k):
        acc = 0
        for s, mask in steps:
            acc += s * (q & mask)
        out.append(Fraction(acc, 1 << shift))
    return out


def lines_of_Fk(k: int, max_lines: int | None = DEFAULT_MAX_TUBES) -> list[Line]:
    """The 2**k lines with k-dyadic slopes in [0, 1)."""
    if max_lines is not None and (1 << k) > max_lines:
        raise CapExceeded(f"family of 2**{k} lines exceeds cap {max_lines}")
    grid = intercept_grid(k)
    denom = 1 << k
    return [Line(Fraction(q, denom), c) for q, c in enumerate(grid)]


def tube_hexagon(line: Line, delta: Rat, x_lo: Rat, x_hi: Rat) -> ConvexPoly:
    """Closed sup-norm delta-neighbourhood of the segment of `line` over
    [x_lo, x_hi]: a hexagon (rectangle when the slope is 0)."""
    delta, x_lo, x_hi = Fraction(delta), Fraction(x_lo), Fraction(x_hi)
    if delta <= 0 or x_lo >= x_hi:
        raise ValueError("need delta > 0 and x_lo < x_hi")
    y0 = line.y(x_lo)
    y1 = line.y(x_hi)
    corners = []
    for cx, cy in ((x_lo, y0), (x_hi, y1)):
        corners += [
            (cx - delta, cy - delta),
            (cx + delta, cy - delta),
            (cx + delta, cy + delta),
            (cx - delta, cy + delta),
        ]
    hull = convex_hull(corners)
    assert hull is not None
    return hull


@dataclass(frozen=True)
class TubeFamily:
    """A tube region plus the line data needed for covered-tube pruning.

    `lines[i]` describes the axis of `region.polys[i]` before clipping;
    the strip bounds and delta are shared.  Translation and clipping keep
    the pairing intact (fully clipped-away tubes are dropped from both).
    """

    region: Region
    lines: tuple[Line, ...]
    delta: Rat
    x_lo: Rat
    x_hi: Rat

    def translate(self, dx: Rat, dy: Rat) -> "TubeFamily":
        dx, dy = Fraction(dx), Fraction(dy)
        moved = [
            Line(ln.slope, ln.intercept - ln.slope * dx + dy) for ln in self.lines
        ]
        return TubeFamily(
            self.region.translate(dx, dy),
            tuple(moved),
            self.delta,
            self.x_lo + dx,
            self.x_hi + dx,
        )

    def clip_to_rect(self, rect: Rect) -> "TubeFamily":
        polys = []
        lines = []
        for poly, ln in zip(self.region.polys, self.lines):
            clipped = clip_poly_rect(poly, rect)
            if clipped is not None:
                polys.append(clipped)
                lines.append(ln)
        return TubeFamily(
            Region(tuple(polys)), tuple(lines), self.delta, self.x_lo, self.x_hi
        )

    def pruner(self):
        """Column filter for `union_area_grid`: drops tubes whose column
        restriction is certified to lie inside the union of two kept
        neighbours.  Certificates compare the analytic (unclipped) hexagon
        bounds, which is sound for the clipped region as well.

        The bounds are piecewise linear in x with kinks shared by every
        tube, so checking the witness inequalities at the column walls and
        the in-column kinks checks them everywhere in the column.
        """
        delta = Fraction(self.delta)
        xl, xh = Fraction(self.x_lo), Fraction(self.x_hi)
        lines = self.lines
        # common dyadic scale: X coordinates by S, Y values by S*S
        dens = [delta.denominator, xl.denominator, xh.denominator]
        for ln in lines:
            dens.append(Fraction(ln.slope).denominator)
            dens.append(Fraction(ln.intercept).denominator)
        base = lcm(*dens)

        coef_cache: dict[int, tuple[list[int], list[int]]] = {}

        def _coefs(S: int) -> tuple[list[int], list[int]]:
            got = coef_cache.get(S)
            if got is None:
                As = [int(Fraction(ln.slope) * S) for ln in lines]
                Cs = [int(Fraction(ln.intercept) * S) * S for ln in lines]
                got = coef_cache[S] = (As, Cs)
            return got

        def prune(ids: list[int], x0: Fraction, x1: Fraction) -> list[int]:
            stations = [x0, x1]
            for kink in (xl - delta, xl + delta, xh - delta, xh + delta):
                if x0 < kink < x1:
                    stations.append(kink)
            stations.sort()
            S = lcm(base, x0.denominator, x1.denominator)
            SX = [int(x * S) for x in stations]
            D = int(delta * S)
            XL, XH = int(xl * S), int(xh * S)
            ns = len(stations)
            As, Cs = _coefs(S)

            vals: dict[int, list[tuple[int, int]]] = {}
            mid_key: dict[int, int] = {}
            for i in ids:
                A = As[i]
                C = Cs[i]
                row = []
                for X in SX:
                    lo = A * XL + C - D * S
                    alt = A * (X - D) + C - D * S
                    if alt > lo:
                        lo = alt
                    hi = A * XH + C + D * S
                    alt = A * (X + D) + C + D * S
                    if alt < hi:
                        hi = alt
                    row.append((lo, hi))
                vals[i] = row
                mid_key[i] = row[0][0] + row[0][1] + row[-1][0] + row[-1][1]

            def covered(i: int, p: int, n: int) -> bool:
                vi, vp, vn = vals[i], vals[p], vals[n]
                for va, vb in ((vp, vp), (vn, vn), (vp, vn), (vn, vp)):
                    for s in range(ns):
                        lo_i, hi_i = vi[s]
                        lo_a, hi_a = va[s]
                        lo_b, hi_b = vb[s]
                        if lo_a > lo_i or hi_b < hi_i or lo_b > hi_a:
                            break
                    else:
                        return True
                return False

            # witnesses must be vertically adjacent, so order by position
            kept = sorted(ids, key=lambda i: mid_key[i])
            for _ in range(40):
                if len(kept) < 3:
                    break
                out = [kept[0]]
                changed = False
                pos = 1
                while pos < len(kept) - 1:
                    if covered(kept[pos], out[-1], kept[pos + 1]):
                        changed = True
                    else:
                        out.append(kept[pos])
                    pos += 1
                out.append(kept[-1])
                kept = out
                if not changed:
                    break
            return kept

        # burial certificates fire once neighbouring tubes overlap along the
        # whole column, which needs columns of a few tube widths
        prune.active_width = 64 * delta
        prune.leaf_width = 4 * delta
        return prune


def precursor_family(
    spec: PrecursorSpec, max_tubes: int | None = DEFAULT_MAX_TUBES
) -> TubeFamily:
    lines = lines_of_Fk(spec.k, max_tubes)
    x0, x1 = spec.strip()
    polys = tuple(tube_hexagon(ln, spec.delta, x0, x1) for ln in lines)
    return TubeFamily(Region(polys), tuple(lines), spec.delta, x0, x1)


def precursor_region(
    spec: PrecursorSpec, max_tubes: int | None = DEFAULT_MAX_TUBES
) -> Region:
    """Union of the delta-tubes of family k over the strip of `spec`."""
    return precursor_family(spec, max_tubes).region


def family_grid_areas(
    family: TubeFamily,
    x_cuts: list[Rat],
    y_cuts: list[Rat],
) -> dict[tuple[int, int], Rat]:
    """Exact per-cell union areas of `family.region`, same contract as
    `union_area_grid`.

    Fast path for unclipped families: every tube spans the full x-extent and
    its bounds kink only at the two shared abscissas, so the plane splits
    into columns a few tube widths wide in which every bound is linear.
    Burial certificates (tube inside the union of two kept neighbours) then
    reduce to comparisons at the column walls, batched over whole columns.
    Certificates only discard provably redundant tubes; the survivors are
    swept exactly, so the result equals the unpruned computation.
    """
    x_cuts = sorted({Fraction(c) for c in x_cuts})
    y_cuts = sorted({Fraction(c) for c in y_cuts})
    polys = list(family.region.polys)
    n = len(polys)
    delta = Fraction(family.delta)
    xl, xh = Fraction(family.x_lo), Fraction(family.x_hi)
    ex0, ex1 = xl - delta, xh + delta

    def fallback() -> dict[tuple[int, int], Rat]:
        return union_area_grid(family.region, x_cuts, y_cuts, pruner=family.pruner())

    if n < 64:
        return fallback()
    for p in polys:
        bb = p.bbox()
        if bb[0] != ex0 or bb[2] != ex1:
            # clipped or degenerate tubes: certificates cover more than the
            # geometry, walls no longer align with the kinks
            return fallback()

    # aligned walls: kinks plus steps of four tube widths, then mandatory cuts
    walls = {ex0, ex1, xl + delta, xh - delta}
    w = xl + delta
    while w < xh - delta:
        walls.add(w)
        w += 4 * delta
    walls.update(c for c in x_cuts if ex0 < c < ex1)
    wall_list = sorted(walls)

    dens = [delta.denominator, xl.denominator, xh.denominator]
    dens += [w.denominator for w in wall_list]
    for ln in family.lines:
        dens.append(Fraction(ln.slope).denominator)
        dens.append(Fraction(ln.intercept).denominator)
    S = lcm(*dens)

    D = int(delta * S)
    XL, XH = int(xl * S), int(xh * S)
    Wi = [int(w * S) for w in wall_list]
    a_i = [int(Fraction(ln.slope) * S) for ln in family.lines]
    c_i = [int(Fraction(ln.intercept) * S) * S for ln in family.lines]

    # the certificate values must fit int64 (with headroom for 4-term sums)
    wmax = max(abs(Wi[0]), abs(Wi[-1]))
    amax = max(abs(v) for v in a_i)
    cmax = max(abs(v) for v in c_i)
    if (amax * (wmax + D) + cmax + D * S).bit_length() >= 60:
        return fallback()

    A = np.array(a_i, dtype=np.int64)
    C = np.array(c_i, dtype=np.int64)
    DS = D * S
    flat_lo = A * XL + C - DS
    flat_hi = A * XH + C + DS

    # clamped tube bounds at a wall; between adjacent walls both are linear
    wall_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def wall_vals(X: int) -> tuple[np.ndarray, np.ndarray]:
        got = wall_cache.get(X)
        if got is None:
            lo = np.maximum(A * (X - D) + C - DS, flat_lo)
            hi = np.minimum(A * (X + D) + C + DS, flat_hi)
            got = wall_cache[X] = (lo, hi)
        return got

    def bury(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Positions whose [lo, hi] slab is not certified redundant.

        Candidates alternate with their witnesses in the vertical order, so
        every witness used in a pass survives that pass.
        """
        kept = np.argsort(lo.sum(1) + hi.sum(1), kind="stable")
        for _ in range(200):
            changed = False
            for par in (1, 2):
                if kept.size < par + 2:
                    continue
                pos = np.arange(par, kept.size - 1, 2)
                li, hi_i = lo[kept[pos]], hi[kept[pos]]
                la, ha = lo[kept[pos - 1]], hi[kept[pos - 1]]
                lb, hb = lo[kept[pos + 1]], hi[kept[pos + 1]]
                cover_a = (la <= li).all(1)
                cover_b = (lb <= li).all(1)
                cap_a = (ha >= hi_i).all(1)
                cap_b = (hb >= hi_i).all(1)
                cov = (
                    (cover_a & cap_a)
                    | (cover_b & cap_b)
                    | (cover_a & cap_b & (lb <= ha).all(1))
                    | (cover_b & cap_a & (la <= hb).all(1))
                )
                if cov.any():
                    kept = np.delete(kept, pos[cov])
                    changed = True
            if not changed:
                break
        return np.sort(kept)

    ctx = sweep_context(polys, y_cuts)
    ncuts = len(x_cuts)

    def refine(ids: np.ndarray, X0: int, X1: int, col: int, budget: int) -> None:
        # re-burying after each halving keeps shrinking the stack until the
        # survivors are genuinely needed at this width
        lo0, hi0 = wall_vals(X0)
        lo1, hi1 = wall_vals(X1)
        lo = np.stack((lo0[ids], lo1[ids]), axis=1)
        hi = np.stack((hi0[ids], hi1[ids]), axis=1)
        kept = ids[bury(lo, hi)]
        if kept.size > 48 and X1 - X0 >= 2:
            nb = budget if kept.size <= ids.size - ids.size // PRUNE_SHRINK else budget - 1
            if nb >= 0:
                Xm = (X0 + X1) // 2
                refine(kept, X0, Xm, col, nb)
                refine(kept, Xm, X1, col, nb)
                return
        sweep_column(ctx, kept.tolist(), Fraction(X0, S), Fraction(X1, S), col)

    all_ids = np.arange(n)
    col = 0
    for ci in range(len(wall_list) - 1):
        w0 = wall_list[ci]
        while col < ncuts and x_cuts[col] <= w0:
            col += 1
        refine(all_ids, Wi[ci], Wi[ci + 1], col, PRUNE_BUDGET)

    return {k: v for k, v in ctx.out.items() if v != 0}


UNIT_SQUARE: Rect = (Fraction(0), Fraction(0), Fraction(1), Fraction(1))


def piece_family(
    spec: PrecursorSpec, j: int, max_tubes: int | None = DEFAULT_MAX_TUBES
) -> TubeFamily:
    fam = precursor_family(spec, max_tubes)
    xr = spec.xhat.to_rat()
    dx = -(xr.numerator // xr.denominator)
    return fam.translate(Fraction(dx), Fraction(-j)).clip_to_rect(UNIT_SQUARE)


def translated_piece(
    spec: PrecursorSpec, j: int, max_tubes: int | None = DEFAULT_MAX_TUBES
) -> Region:
    """Unit-square part of the precursor shifted down j cells and left to
    the integer cell of xhat."""
    return piece_family(spec, j, max_tubes).region
