from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kakeyalab.construction import (
    CapExceeded,
    Line,
    PrecursorSpec,
    b_exact,
    b_k,
    family_grid_areas,
    fold_point,
    intercept_grid,
    lines_of_Fk,
    piece_family,
    precursor_family,
    precursor_region,
    translated_piece,
    tube_hexagon,
)
from kakeyalab.numeric import Dyadic
from kakeyalab.region import Region, contains_point, union_area, union_area_grid
from kakeyalab.sequence import x_at

F = Fraction


def test_b_k_examples():
    assert b_k(1, F(1, 4)) == F(-1, 4)
    assert b_k(3, F(3, 8)) == F(-5, 16)
    assert b_k(0, F(1, 2)) == 0
    assert b_k(2, F(1, 4)) == F(-1, 4)


def test_b_exact_examples():
    assert b_exact(F(1, 2)) == 0
    assert b_exact(F(0)) == 0
    assert b_exact(F(1, 4)) == F(-1, 4)
    with pytest.raises(ValueError):
        b_exact(F(1, 3))


@given(st.integers(min_value=0, max_value=20), st.integers(min_value=0, max_value=10))
def test_b_exact_is_b_k_limit(num, extra):
    # once 2**k clears the slope's denominator the sum stops changing
    a = F(num, 1 << 5) % 1
    k0 = a.denominator.bit_length() - 1
    assert b_k(k0 + extra, a) == b_exact(a)


def test_intercept_grid_small():
    assert intercept_grid(2) == [0, F(-1, 4), 0, F(-1, 4)]


@given(st.integers(min_value=0, max_value=9))
@settings(deadline=None)
def test_intercept_grid_matches_reference(k):
    grid = intercept_grid(k)
    assert len(grid) == 1 << k
    for q in range(0, 1 << k, max(1, (1 << k) // 16)):
        assert grid[q] == b_k(k, F(q, 1 << k))


@given(st.integers(min_value=1, max_value=8), st.data())
def test_b_k_piecewise_slope(k, data):
    # between consecutive k-dyadic points b_k is linear with slope -x_k
    q = data.draw(st.integers(min_value=0, max_value=(1 << k) - 1))
    a0 = F(q, 1 << k)
    a1 = a0 + F(1, 1 << (k + 2))
    a2 = a0 + F(1, 1 << (k + 1))
    v0, v1, v2 = b_k(k, a0), b_k(k, a1), b_k(k, a2)
    slope = -x_at(k).to_rat()
    assert v1 - v0 == slope * (a1 - a0)
    assert v2 - v1 == slope * (a2 - a1)


@given(st.integers(min_value=0, max_value=4), st.data())
@settings(deadline=None)
def test_b_k_tail_bound(m, data):
    # with x_k taken from block m, |b_K - b_k| <= 2**-(m+k) for K >= k
    scaled = data.draw(st.integers(min_value=-(m << m), max_value=m << m))
    xhat = Dyadic.make(scaled, m)
    from kakeyalab.sequence import index_of

    k = index_of(m, xhat).k
    K = k + data.draw(st.integers(min_value=1, max_value=6))
    a = F(data.draw(st.integers(min_value=0, max_value=(1 << K) - 1)), 1 << K)
    assert abs(b_k(K, a) - b_k(k, a)) <= F(1, 1 << (m + k))


def test_lines_of_F2():
    lines = lines_of_Fk(2)
    assert [ln.slope for ln in lines] == [0, F(1, 4), F(1, 2), F(3, 4)]
    assert [ln.intercept for ln in lines] == [0, F(-1, 4), 0, F(-1, 4)]


def test_lines_cap():
    with pytest.raises(CapExceeded):
        lines_of_Fk(10, max_lines=512)


def test_tube_hexagon_examples():
    # zero slope: a rectangle
    r = tube_hexagon(Line(F(0), F(0)), F(1, 2), F(0), F(1, 2))
    assert set(r.verts) == {
        (F(-1, 2), F(-1, 2)),
        (F(1), F(-1, 2)),
        (F(1), F(1, 2)),
        (F(-1, 2), F(1, 2)),
    }
    assert r.area() == F(3, 2)
    # slanted: a hexagon
    h = tube_hexagon(Line(F(1, 2), F(0)), F(1, 8), F(0), F(1, 2))
    assert len(h.verts) == 6
    assert h.area() == F(1, 4)


@given(
    st.integers(min_value=0, max_value=31),
    st.integers(min_value=1, max_value=8),
    st.integers(min_value=1, max_value=6),
)
def test_tube_hexagon_area_formula(qa, dexp, wnum):
    # Minkowski area oracle: 4*delta**2 + 2*delta*w*(1+a)
    a = F(qa, 32)
    delta = F(1, 1 << dexp)
    w = F(wnum, 4)
    line = Line(a, F(-3, 7))
    poly = tube_hexagon(line, delta, F(1, 3), F(1, 3) + w)
    assert poly.area() == 4 * delta**2 + 2 * delta * w * (1 + a)


@given(st.integers(min_value=0, max_value=31), st.integers(min_value=-64, max_value=64))
def test_tube_hexagon_contains_axis(qa, xq):
    a = F(qa, 32)
    line = Line(a, F(5, 9))
    delta = F(1, 16)
    poly = tube_hexagon(line, delta, F(0), F(1))
    x = F(xq, 64)
    if 0 <= x <= 1:
        assert poly.contains((x, line.y(x)), "interior")


def test_precursor_spec_resolution():
    s = PrecursorSpec.resolve(1, Dyadic(1, 0))
    assert (s.k, s.delta, s.coupled) == (1, F(1, 2), True)
    s = PrecursorSpec.resolve(1, Dyadic(0, 0))
    assert (s.k, s.delta, s.coupled) == (3, F(1, 8), True)
    s = PrecursorSpec.resolve(0, Dyadic(0, 0))
    assert (s.k, s.delta, s.coupled) == (0, F(2), True)
    s = PrecursorSpec.resolve(2, Dyadic(0, 0))
    assert (s.k, s.coupled) == (15, True)
    s = PrecursorSpec.resolve(2, Dyadic(0, 0), k_cap=8)
    assert (s.k, s.delta, s.coupled) == (8, F(1, 1 << 9), False)
    s = PrecursorSpec.resolve(1, Dyadic(0, 0), k_override=5)
    assert (s.k, s.coupled) == (5, False)


def test_precursor_region_examples():
    r = precursor_region(PrecursorSpec.resolve(1, Dyadic(1, 0)))
    assert len(r.polys) == 2
    r = precursor_region(PrecursorSpec.resolve(1, Dyadic(0, 0)))
    assert len(r.polys) == 8
    r = precursor_region(PrecursorSpec.resolve(0, Dyadic(0, 0)))
    assert len(r.polys) == 1
    # m=0: single tube of delta=2 around y=0 over [0,1): spans [-2,3]x[-2,2]
    assert r.polys[0].bbox() == (F(-2), F(-2), F(3), F(2))
    assert union_area(r) == 20


def test_precursor_contains_line_point():
    # the slope-1/4 line of the limit family passes through (1/4, -3/16)
    r = precursor_region(PrecursorSpec.resolve(1, Dyadic(0, 0)))
    assert contains_point(r, (F(1, 4), F(-3, 16)), "interior")


def test_fold_point_examples():
    fp = fold_point(F(5, 4), F(-1, 2))
    assert (fp.point, fp.i, fp.j) == ((F(1, 4), F(1, 2)), 1, -1)
    fp = fold_point(F(-1, 4), F(2))
    assert (fp.point, fp.i, fp.j) == ((F(3, 4), F(0)), -1, 2)
    fp = fold_point(F(0), F(0))
    assert (fp.point, fp.i, fp.j) == ((F(0), F(0)), 0, 0)


def test_translated_piece_clips_to_unit_square():
    spec = PrecursorSpec.resolve(1, Dyadic(0, 0))
    piece = translated_piece(spec, 0)
    assert not piece.is_empty()
    x0, y0, x1, y1 = piece.bbox()
    assert 0 <= x0 and x1 <= 1 and 0 <= y0 and y1 <= 1
    # area never exceeds the untranslated precursor's
    assert union_area(piece) <= union_area(precursor_region(spec))
    # piece for a far-away j is empty
    assert translated_piece(spec, 50).is_empty()


def test_piece_family_keeps_line_pairing():
    spec = PrecursorSpec.resolve(1, Dyadic(0, 0))
    fam = piece_family(spec, 0)
    assert len(fam.region.polys) == len(fam.lines)
    # surviving tubes still wrap their (translated) axis where it crosses the square
    for poly, ln in zip(fam.region.polys, fam.lines):
        x0, _, x1, _ = poly.bbox()
        xm = (x0 + x1) / 2
        y = ln.y(xm)
        if 0 < y < 1:
            assert poly.contains((xm, y), "closed")


def test_pruner_preserves_union_areas():
    # pruning is an exact cover certificate: grid areas must be unchanged
    spec = PrecursorSpec.resolve(1, Dyadic(0, 0), k_override=6)
    fam = precursor_family(spec)
    cuts = [F(q, 8) for q in range(-16, 17)]
    plain = union_area_grid(fam.region, cuts, cuts)
    pruned = union_area_grid(fam.region, cuts, cuts, pruner=fam.pruner())
    assert plain == pruned


def test_pruner_preserves_piece_areas():
    spec = PrecursorSpec.resolve(1, Dyadic.make(-1, 1), k_override=7)
    fam = piece_family(spec, 0)
    cuts = [F(q, 4) for q in range(1, 4)]
    plain = union_area_grid(fam.region, cuts, cuts)
    pruned = union_area_grid(fam.region, cuts, cuts, pruner=fam.pruner())
    assert plain == pruned


@pytest.mark.parametrize(
    "m,k,x_cuts,y_cuts",
    [
        (1, 6, [], []),
        (1, 6, [F(1, 4), F(5, 16)], [F(0), F(1, 8), F(1, 3)]),
        (2, 7, [F(1, 3)], [F(1, 7)]),
        (0, 7, [], [F(1, 2)]),
    ],
)
def test_family_grid_areas_matches_generic_sweep(m, k, x_cuts, y_cuts):
    # the batched column driver must reproduce the generic union sweep cell
    # by cell, including non-dyadic cut lines
    spec = PrecursorSpec.resolve(m, Dyadic.make(0, 0), k_override=k)
    fam = precursor_family(spec)
    assert family_grid_areas(fam, x_cuts, y_cuts) == union_area_grid(
        fam.region, x_cuts, y_cuts
    )


def test_family_grid_areas_clipped_family_falls_back():
    # clipping breaks the aligned-wall assumption; the driver must still
    # return exact cells via the generic path
    spec = PrecursorSpec.resolve(1, Dyadic.make(-1, 1), k_override=7)
    fam = piece_family(spec, 0)
    cuts = [F(1, 4), F(1, 2), F(3, 4)]
    assert family_grid_areas(fam, cuts, cuts) == union_area_grid(
        fam.region, cuts, cuts
    )


def test_family_grid_areas_small_family_falls_back():
    spec = PrecursorSpec.resolve(1, Dyadic.make(0, 0), k_override=4)
    fam = precursor_family(spec)
    assert family_grid_areas(fam, [], []) == union_area_grid(fam.region, [], [])
