"""Exact martingale evaluation on dyadic squares.

Three martingale families share one evaluation engine:

* the open-set martingale of a region E in the unit square, with the
  closed form  d_E(Q_r(u,v)) = 4**r * area(E & Q) / area(E)  (equal to
  the recursive allocate-proportionally definition by telescoping, with
  zero propagation included);
* the strip average  d_{m,i,j}(Q) = 2**-m * sum over the 2**m strip
  anchors xhat in [i, i+1) of the open-set martingale of the translated
  unit-square piece for (m, xhat, j);
* the truncated master combination
  sum_{m <= m_max} sum_{pair(i,j) < m} 2**(-m-pair(i,j)) * d_{m,i,j}(Q),
  reported together with the exact tail bound 4**r * 2**(1-m_max) for
  the dropped levels.

Values are Fractions throughout.  The engine memoises region measures
per dyadic square, and exhaustive checks warm whole per-level grids with
a single sweep per piece (coarser levels aggregate exactly from the
finest grid).  Caches never change any value, only the cost.  An engine
instance is single-threaded; run one per worker for parallel traces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .construction import (
    CapExceeded,
    DEFAULT_MAX_TUBES,
    PrecursorSpec,
    TubeFamily,
    UNIT_SQUARE,
    family_grid_areas,
    piece_family,
)
from .numeric import Dyadic, Rat, rat_str
from .region import Rect, Region, union_area_grid, union_area_in_rect

__all__ = [
    "DyadicSquare",
    "OpenSetSpec",
    "AveragedSpec",
    "MasterSpec",
    "MartingaleSpec",
    "TraceRecord",
    "Trace",
    "IdentityRow",
    "IdentityReport",
    "MartingaleEngine",
    "DEFAULT_K_CAP",
    "pair_index",
    "unpair_index",
    "pair_weight_sum",
    "master_tail_bound",
    "osm_value",
    "suffix_level",
    "stabilization_level",
    "threshold_level",
    "spec_to_json",
]

# Strip anchors pick their tube family by sequence position, which grows
# like 4**m; the clamp keeps every piece at or below 2**DEFAULT_K_CAP
# tubes so multi-level combinations stay at desk scale.  Pass k_cap=None
# for fully coupled families.
DEFAULT_K_CAP = 8


# ---------------------------------------------------------------------------
# dyadic squares
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DyadicSquare:
    """Q_r(u, v) = 2**-r * ([u, u+1) x [v, v+1)), inside [0,1)**2."""

    r: int
    u: int
    v: int

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("level must be >= 0")
        side = 1 << self.r
        if not (0 <= self.u < side and 0 <= self.v < side):
            raise ValueError(f"cell ({self.u}, {self.v}) outside level {self.r}")

    def rect(self) -> Rect:
        s = Fraction(1, 1 << self.r)
        return (self.u * s, self.v * s, (self.u + 1) * s, (self.v + 1) * s)

    def parent(self) -> "DyadicSquare":
        if self.r == 0:
            raise ValueError("the root square has no parent")
        return DyadicSquare(self.r - 1, self.u >> 1, self.v >> 1)

    def children(self) -> tuple["DyadicSquare", ...]:
        r, u, v = self.r + 1, self.u << 1, self.v << 1
        return (
            DyadicSquare(r, u, v),
            DyadicSquare(r, u + 1, v),
            DyadicSquare(r, u, v + 1),
            DyadicSquare(r, u + 1, v + 1),
        )

    def contains(self, pt: tuple[Rat, Rat]) -> bool:
        x0, y0, x1, y1 = self.rect()
        x, y = Fraction(pt[0]), Fraction(pt[1])
        return x0 <= x < x1 and y0 <= y < y1

    @staticmethod
    def containing(pt: tuple[Rat, Rat], r: int) -> "DyadicSquare":
        """The unique level-r square whose half-open cell holds pt."""
        x, y = Fraction(pt[0]), Fraction(pt[1])
        if not (0 <= x < 1 and 0 <= y < 1):
            raise ValueError(f"point ({x}, {y}) outside the unit square")
        u = (x.numerator << r) // x.denominator
        v = (y.numerator << r) // y.denominator
        return DyadicSquare(r, u, v)


ROOT = DyadicSquare(0, 0, 0)


# ---------------------------------------------------------------------------
# specs and traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OpenSetSpec:
    """Open-set martingale of `region` (clipped to the unit square)."""

    region: Region


@dataclass(frozen=True)
class AveragedSpec:
    """Average of the 2**m piece martingales with anchors in [i, i+1)."""

    m: int
    i: int
    j: int


@dataclass(frozen=True)
class MasterSpec:
    """Pair-weighted sum of averaged martingales over levels m <= m_max."""

    m_max: int


MartingaleSpec = OpenSetSpec | AveragedSpec | MasterSpec


@dataclass(frozen=True)
class TraceRecord:
    r: int
    square: DyadicSquare
    value: Rat


@dataclass(frozen=True)
class Trace:
    point: tuple[Rat, Rat]
    records: tuple[TraceRecord, ...]
    truncated: bool  # a cap fired before r_max; records stop early

    def values(self) -> list[Rat]:
        return [rec.value for rec in self.records]

    def to_json(self, spec: MartingaleSpec) -> dict:
        return {
            "point": [rat_str(self.point[0]), rat_str(self.point[1])],
            "spec": spec_to_json(spec),
            "records": [
                {
                    "r": rec.r,
                    "u": rec.square.u,
                    "v": rec.square.v,
                    "value": rat_str(rec.value),
                }
                for rec in self.records
            ],
            "truncated": self.truncated,
        }


def spec_to_json(spec: MartingaleSpec) -> dict:
    if isinstance(spec, OpenSetSpec):
        return {"variant": "open-set", "region": spec.region.to_json()}
    if isinstance(spec, AveragedSpec):
        return {"variant": "averaged", "m": spec.m, "i": spec.i, "j": spec.j}
    if isinstance(spec, MasterSpec):
        return {"variant": "master-truncated", "m_max": spec.m_max}
    raise TypeError(f"not a martingale spec: {spec!r}")


# ---------------------------------------------------------------------------
# pairing
# ---------------------------------------------------------------------------


def _zigzag(i: int) -> int:
    return 2 * i if i >= 0 else -2 * i - 1


def _unzigzag(z: int) -> int:
    return z // 2 if z % 2 == 0 else -(z + 1) // 2


def pair_index(i: int, j: int) -> int:
    """Bijection Z x Z -> N: Cantor pairing of the zigzag-folded inputs."""
    x, y = _zigzag(i), _zigzag(j)
    s = x + y
    return s * (s + 1) // 2 + y


def unpair_index(p: int) -> tuple[int, int]:
    if p < 0:
        raise ValueError("pair index must be >= 0")
    w = (isqrt(8 * p + 1) - 1) // 2
    y = p - w * (w + 1) // 2
    x = w - y
    return _unzigzag(x), _unzigzag(y)


def pair_weight_sum(bound: int) -> Rat:
    """sum of 2**-pair(i,j) over pair(i,j) < bound; always < 2."""
    return sum((Fraction(1, 1 << p) for p in range(bound)), Fraction(0))


def master_tail_bound(r: int, m_max: int) -> Rat:
    """Exact bound on the master levels dropped above m_max, at level r.

    Each averaged martingale is <= 4**r at level r and each level's pair
    weights sum to < 2, so the tail is < 4**r * sum_{m > m_max} 2**(1-m)
    = 4**r * 2**(1-m_max).  With m_max = 2r + t + 1 this is 2**-t.
    """
    if r < 0 or m_max < 0:
        raise ValueError("need r >= 0 and m_max >= 0")
    return Fraction(2) ** (2 * r + 1 - m_max)


# ---------------------------------------------------------------------------
# engine
# ---------------------------------------------------------------------------


def osm_value(E: Region, q: DyadicSquare) -> Rat:
    """Closed-form open-set martingale value; E is clipped on entry."""
    E = E.clip_to_rect(UNIT_SQUARE)
    total = union_area_in_rect(E, UNIT_SQUARE)
    if total == 0:
        return Fraction(0)
    return (1 << (2 * q.r)) * union_area_in_rect(E, q.rect()) / total


def _anchors(m: int, i: int) -> list[Dyadic]:
    """The 2**m strip anchors xhat in (2**-m Z) intersect [i, i+1).

    Every anchor must sit inside [-m, m] so its sequence index (and hence
    its tube family) exists; equivalently -m <= i and i + 1 - 2**-m <= m.
    """
    lo = Dyadic.make(i << m, m)
    hi = lo + Dyadic.make((1 << m) - 1, m)
    if lo.to_rat() < -m or hi.to_rat() > m:
        raise ValueError(
            f"strip [{i}, {i + 1}) has anchors outside block {m}'s range [-{m}, {m}]"
        )
    return [Dyadic.make((i << m) + t, m) for t in range(1 << m)]


@dataclass(frozen=True)
class IdentityRow:
    square: DyadicSquare
    value: Rat
    child_average: Rat


@dataclass(frozen=True)
class IdentityReport:
    r_max: int
    parents_checked: int
    initial: Rat
    identity_failures: tuple[IdentityRow, ...]
    growth_failures: tuple[TraceRecord, ...]

    @property
    def identity_ok(self) -> bool:
        return not self.identity_failures

    @property
    def growth_ok(self) -> bool:
        return not self.growth_failures

    @property
    def ok(self) -> bool:
        return self.identity_ok and self.growth_ok


class MartingaleEngine:
    """Evaluates martingale specs exactly, with invisible memoisation.

    k_cap clamps the coupled tube-family index of every piece (None for
    no clamp); max_tubes is the hard construction cap and raising past it
    raises CapExceeded.  Measure caches are keyed by the atomic region
    (an open-set spec or one translated piece) and by dyadic square, so
    repeated traces and exhaustive sweeps share work.
    """

    def __init__(
        self,
        k_cap: int | None = DEFAULT_K_CAP,
        max_tubes: int | None = DEFAULT_MAX_TUBES,
    ) -> None:
        self.k_cap = k_cap
        self.max_tubes = max_tubes
        self._pieces: dict[tuple[int, Rat, int], TubeFamily] = {}
        self._clipped: dict[OpenSetSpec, Region] = {}
        self._grids: dict[object, dict[int, dict[tuple[int, int], Rat]]] = {}
        self._cells: dict[tuple[object, DyadicSquare], Rat] = {}

    # -- atomic regions ----------------------------------------------------

    def open_region(self, spec: OpenSetSpec) -> Region:
        got = self._clipped.get(spec)
        if got is None:
            got = self._clipped[spec] = spec.region.clip_to_rect(UNIT_SQUARE)
        return got

    def piece(self, m: int, xhat: Dyadic, j: int) -> TubeFamily:
        key = (m, xhat.to_rat(), j)
        got = self._pieces.get(key)
        if got is None:
            spec = PrecursorSpec.resolve(m, xhat, k_cap=self.k_cap)
            got = self._pieces[key] = piece_family(spec, j, self.max_tubes)
        return got

    def piece_total(self, m: int, xhat: Dyadic, j: int) -> Rat:
        """Unit-square measure of one translated piece."""
        fam = self.piece(m, xhat, j)
        return self._measure(("piece", m, xhat.to_rat(), j), fam.region, ROOT)

    # -- measures ----------------------------------------------------------

    def _measure(self, key: object, region: Region, q: DyadicSquare) -> Rat:
        grids = self._grids.get(key)
        if grids is not None:
            grid = grids.get(q.r)
            if grid is not None:
                return grid.get((q.u, q.v), Fraction(0))
        cell_key = (key, q)
        got = self._cells.get(cell_key)
        if got is None:
            got = self._cells[cell_key] = union_area_in_rect(region, q.rect())
        return got

    def _warm(self, key: object, source: TubeFamily | Region, r_max: int) -> None:
        """Build per-level cell grids for levels 0..r_max in one sweep.

        The finest level is swept once; every coarser cell is the exact
        sum of its four children, so aggregation stays exact.
        """
        grids = self._grids.setdefault(key, {})
        if all(r in grids for r in range(r_max + 1)):
            return
        cuts = [Fraction(t, 1 << r_max) for t in range(1, 1 << r_max)]
        if isinstance(source, TubeFamily):
            fine = family_grid_areas(source, cuts, cuts)
        else:
            fine = union_area_grid(source, cuts, cuts)
        grids[r_max] = fine
        for r in range(r_max - 1, -1, -1):
            coarse: dict[tuple[int, int], Rat] = {}
            for (u, v), a in grids[r + 1].items():
                ck = (u >> 1, v >> 1)
                coarse[ck] = coarse.get(ck, Fraction(0)) + a
            grids[r] = coarse

    def _osm(self, key: object, region: Region, q: DyadicSquare) -> Rat:
        total = self._measure(key, region, ROOT)
        if total == 0:
            return Fraction(0)
        return (1 << (2 * q.r)) * self._measure(key, region, q) / total

    # -- spec evaluation ---------------------------------------------------

    def value(self, spec: MartingaleSpec, q: DyadicSquare) -> Rat:
        if isinstance(spec, OpenSetSpec):
            return self._osm(spec, self.open_region(spec), q)
        if isinstance(spec, AveragedSpec):
            return self.averaged_value(spec.m, spec.i, spec.j, q)
        if isinstance(spec, MasterSpec):
            return self.master_truncated(q, m_max=spec.m_max)[0]
        raise TypeError(f"not a martingale spec: {spec!r}")

    def averaged_value(self, m: int, i: int, j: int, q: DyadicSquare) -> Rat:
        total = Fraction(0)
        for xhat in _anchors(m, i):
            fam = self.piece(m, xhat, j)
            total += self._osm(("piece", m, xhat.to_rat(), j), fam.region, q)
        return total / (1 << m)

    def master_truncated(
        self,
        q: DyadicSquare,
        t: int | None = None,
        m_max: int | None = None,
    ) -> tuple[Rat, Rat]:
        """Truncated master value and the exact bound on the dropped tail.

        The untruncated sum runs m through 2r + t + 1; passing t alone
        selects that level (usually infeasible by design, the per-piece
        caps will fire).  The tail bound 4**r * 2**(1 - m_max) comes from
        value <= 4**r per martingale and weight sum < 2 per level.
        """
        if m_max is None:
            if t is None:
                raise ValueError("need t or m_max")
            m_max = 2 * q.r + t + 1
        value = Fraction(0)
        for m in range(1, m_max + 1):
            for p in range(m):
                i, j = unpair_index(p)
                w = Fraction(1, 1 << (m + p))
                value += w * self.averaged_value(m, i, j, q)
        return value, master_tail_bound(q.r, m_max)

    # -- traces and exhaustive checks ---------------------------------------

    def trace(
        self, pt: tuple[Rat, Rat], spec: MartingaleSpec, r_max: int
    ) -> Trace:
        x, y = Fraction(pt[0]), Fraction(pt[1])
        records = []
        truncated = False
        for r in range(r_max + 1):
            q = DyadicSquare.containing((x, y), r)
            try:
                val = self.value(spec, q)
            except CapExceeded:
                truncated = True
                break
            records.append(TraceRecord(r, q, val))
        return Trace((x, y), tuple(records), truncated)

    def _warm_spec(self, spec: MartingaleSpec, r_max: int) -> None:
        if isinstance(spec, OpenSetSpec):
            self._warm(spec, self.open_region(spec), r_max)
        elif isinstance(spec, AveragedSpec):
            for xhat in _anchors(spec.m, spec.i):
                fam = self.piece(spec.m, xhat, spec.j)
                self._warm(("piece", spec.m, xhat.to_rat(), spec.j), fam, r_max)
        elif isinstance(spec, MasterSpec):
            for m in range(1, spec.m_max + 1):
                for p in range(m):
                    i, j = unpair_index(p)
                    self._warm_spec(AveragedSpec(m, i, j), r_max)
        else:
            raise TypeError(f"not a martingale spec: {spec!r}")

    def verify_martingale_identity(
        self, spec: MartingaleSpec, r_max: int
    ) -> IdentityReport:
        """Exhaustive exact check of the averaging identity and the growth
        bound: every square with r < r_max must equal the mean of its four
        children, and every value through r_max must be <= 4**r * initial.
        """
        self._warm_spec(spec, r_max)
        initial = self.value(spec, ROOT)
        level = {ROOT: initial}
        id_fail: list[IdentityRow] = []
        gr_fail: list[TraceRecord] = []
        for rec_r in range(r_max + 1):
            bound = (1 << (2 * rec_r)) * initial
            for sq, val in level.items():
                if val > bound:
                    gr_fail.append(TraceRecord(rec_r, sq, val))
            if rec_r == r_max:
                break
            nxt: dict[DyadicSquare, Rat] = {}
            for sq, val in level.items():
                kids = sq.children()
                kid_vals = [self.value(spec, k) for k in kids]
                nxt.update(zip(kids, kid_vals))
                child_avg = sum(kid_vals, Fraction(0)) / 4
                if child_avg != val:
                    id_fail.append(IdentityRow(sq, val, child_avg))
            level = nxt
        parents = sum(1 << (2 * r) for r in range(r_max))
        return IdentityReport(
            r_max, parents, initial, tuple(id_fail), tuple(gr_fail)
        )


# ---------------------------------------------------------------------------
# trace analysis
# ---------------------------------------------------------------------------


def suffix_level(trace: Trace, pred) -> int | None:
    """Smallest r whose whole record suffix satisfies pred, if any."""
    records = trace.records
    if not records:
        return None
    level = None
    for rec in reversed(records):
        if pred(rec.value):
            level = rec.r
        else:
            break
    return level


def stabilization_level(trace: Trace, target: Rat) -> int | None:
    """First r from which every traced value equals target."""
    return suffix_level(trace, lambda v: v == target)


def threshold_level(trace: Trace, threshold: Rat) -> int | None:
    """First r from which every traced value is >= threshold."""
    return suffix_level(trace, lambda v: v >= threshold)
