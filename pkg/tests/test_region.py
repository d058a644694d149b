from fractions import Fraction
from itertools import combinations

from hypothesis import given, settings
from hypothesis import strategies as st

from kakeyalab.region import (
    ConvexPoly,
    Region,
    clip_poly_halfplane,
    clip_poly_rect,
    contains_point,
    poly_area,
    union_area,
    union_area_grid,
    union_area_in_rect,
)

F = Fraction


def square(x0, y0, side=1):
    return ConvexPoly.from_points(
        [(F(x0), F(y0)), (F(x0) + side, F(y0)), (F(x0) + side, F(y0) + side), (F(x0), F(y0) + side)]
    )


def rect_poly(x0, y0, x1, y1):
    return ConvexPoly.from_points([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


# --- independent oracle: inclusion-exclusion over axis-aligned rectangles ---


def rects_union_area_ie(rects):
    total = F(0)
    n = len(rects)
    for size in range(1, n + 1):
        sign = 1 if size % 2 else -1
        for combo in combinations(range(n), size):
            x0 = max(rects[i][0] for i in combo)
            y0 = max(rects[i][1] for i in combo)
            x1 = min(rects[i][2] for i in combo)
            y1 = min(rects[i][3] for i in combo)
            if x0 < x1 and y0 < y1:
                total += sign * (x1 - x0) * (y1 - y0)
    return total


dyadic_coord = st.integers(min_value=-24, max_value=24).map(lambda n: F(n, 8))


@st.composite
def dyadic_rect(draw):
    x0 = draw(dyadic_coord)
    y0 = draw(dyadic_coord)
    w = draw(st.integers(min_value=1, max_value=20))
    h = draw(st.integers(min_value=1, max_value=20))
    return (x0, y0, x0 + F(w, 8), y0 + F(h, 8))


@st.composite
def small_triangle(draw):
    pts = []
    for _ in range(3):
        pts.append((draw(dyadic_coord), draw(dyadic_coord)))
    return pts


def test_poly_area_examples():
    assert poly_area(square(0, 0)) == 1
    tri = ConvexPoly.from_points([(F(0), F(0)), (F(2), F(0)), (F(0), F(2))])
    assert poly_area(tri) == 2


def test_from_points_canonicalises():
    # clockwise input gets reoriented
    p = ConvexPoly.from_points([(F(0), F(0)), (F(0), F(1)), (F(1), F(1)), (F(1), F(0))])
    assert p is not None and p.area() == 1
    # collinear middle vertex dropped
    p = ConvexPoly.from_points([(F(0), F(0)), (F(1), F(0)), (F(2), F(0)), (F(2), F(2)), (F(0), F(2))])
    assert p is not None and len(p.verts) == 4
    # degenerate inputs rejected
    assert ConvexPoly.from_points([(F(0), F(0)), (F(1), F(1)), (F(2), F(2))]) is None
    assert ConvexPoly.from_points([(F(0), F(0)), (F(1), F(0))]) is None


def test_clip_examples():
    big = rect_poly(F(0), F(0), F(2), F(2))
    got = clip_poly_rect(big, (F(0), F(0), F(1), F(1)))
    assert got is not None and got.area() == 1
    tri = ConvexPoly.from_points([(F(0), F(0)), (F(2), F(0)), (F(0), F(2))])
    got = clip_poly_rect(tri, (F(0), F(0), F(1), F(1)))
    assert got is not None and got.area() == 1  # the square lies inside the triangle
    got = clip_poly_rect(tri, (F(1), F(1), F(3), F(3)))
    assert got is None  # only the corner point (1,1) touches
    got = clip_poly_rect(big, (F(5), F(5), F(6), F(6)))
    assert got is None


def test_clip_halfplane_triangle():
    tri = ConvexPoly.from_points([(F(0), F(0)), (F(2), F(0)), (F(0), F(2))])
    # keep x + y <= 1: similar triangle with half the side
    got = clip_poly_halfplane(tri, F(1), F(1), F(1))
    assert got is not None and got.area() == F(1, 2)


def test_union_two_overlapping_squares():
    r = Region.from_polys([square(0, 0), rect_poly(F(1, 2), F(0), F(3, 2), F(1))])
    assert union_area(r) == F(3, 2)


def test_union_touching_and_identical():
    r = Region.from_polys([square(0, 0), square(1, 0)])
    assert union_area(r) == 2  # shared edge has zero area
    r = Region.from_polys([square(0, 0), square(0, 0), square(0, 0)])
    assert union_area(r) == 1
    r = Region.from_polys([square(0, 0), square(1, 1)])
    assert union_area(r) == 2  # corner touch


def test_union_nested():
    r = Region.from_polys([rect_poly(F(0), F(0), F(4), F(4)), square(1, 1)])
    assert union_area(r) == 16


@settings(max_examples=60, deadline=None)
@given(st.lists(dyadic_rect(), min_size=1, max_size=5))
def test_union_matches_inclusion_exclusion(rects):
    region = Region.from_polys([rect_poly(*r) for r in rects])
    assert union_area(region) == rects_union_area_ie(rects)


@settings(max_examples=60, deadline=None)
@given(st.lists(dyadic_rect(), min_size=1, max_size=6))
def test_union_matches_lattice_count(rects):
    # all coordinates are multiples of 1/8, so counting half-open membership
    # on the 1/16 lattice is exact
    region = Region.from_polys([rect_poly(*r) for r in rects])
    x0 = min(r[0] for r in rects)
    y0 = min(r[1] for r in rects)
    x1 = max(r[2] for r in rects)
    y1 = max(r[3] for r in rects)
    h = F(1, 16)
    count = 0
    nx = int((x1 - x0) / h)
    ny = int((y1 - y0) / h)
    for i in range(nx):
        px = x0 + i * h
        for j in range(ny):
            py = y0 + j * h
            if any(r[0] <= px < r[2] and r[1] <= py < r[3] for r in rects):
                count += 1
    assert union_area(region) == count * h * h


def poly_intersection(p, q):
    out = p
    n = len(q.verts)
    for i in range(n):
        if out is None:
            return None
        (x0, y0), (x1, y1) = q.verts[i], q.verts[(i + 1) % n]
        # interior of q is left of each CCW edge: (x1-x0)(y-y0)-(y1-y0)(x-x0) >= 0
        out = clip_poly_halfplane(out, y1 - y0, x0 - x1, y1 * x0 - y0 * x1)
    return out


@settings(max_examples=80, deadline=None)
@given(st.lists(small_triangle(), min_size=1, max_size=3))
def test_union_matches_clipping_inclusion_exclusion(tris):
    polys = [p for p in (ConvexPoly.from_points(t) for t in tris) if p is not None]
    if not polys:
        return
    total = F(0)
    for size in range(1, len(polys) + 1):
        sign = 1 if size % 2 else -1
        for combo in combinations(polys, size):
            inter = combo[0]
            for other in combo[1:]:
                inter = None if inter is None else poly_intersection(inter, other)
            if inter is not None:
                total += sign * inter.area()
    assert union_area(Region.from_polys(polys)) == total


@settings(max_examples=40, deadline=None)
@given(st.lists(small_triangle(), min_size=1, max_size=4), dyadic_coord, dyadic_coord)
def test_union_translation_invariant(tris, dx, dy):
    polys = [ConvexPoly.from_points(t) for t in tris]
    region = Region.from_polys(polys)
    if region.is_empty():
        return
    moved = region.translate(dx, dy)
    assert union_area(moved) == union_area(region)


@settings(max_examples=40, deadline=None)
@given(st.lists(small_triangle(), min_size=1, max_size=4), dyadic_coord)
def test_union_splits_at_vertical_line(tris, xc):
    region = Region.from_polys([ConvexPoly.from_points(t) for t in tris])
    if region.is_empty():
        return
    total = union_area(region)
    big = F(100)
    left = union_area_in_rect(region, (-big, -big, xc, big))
    right = union_area_in_rect(region, (xc, -big, big, big))
    assert left + right == total
    assert F(0) <= total <= sum(p.area() for p in region.polys)


@settings(max_examples=30, deadline=None)
@given(st.lists(dyadic_rect(), min_size=1, max_size=5))
def test_grid_cells_sum_and_match_rect_clips(rects):
    region = Region.from_polys([rect_poly(*r) for r in rects])
    x_cuts = [F(-1), F(0), F(1)]
    y_cuts = [F(0), F(3, 2)]
    cells = union_area_grid(region, x_cuts, y_cuts)
    assert sum(cells.values()) == union_area(region)
    # spot-check one interior cell against the direct clipped computation
    big = F(1000)
    walls_x = [-big] + x_cuts + [big]
    walls_y = [-big] + y_cuts + [big]
    for (i, j), a in cells.items():
        rect = (walls_x[i], walls_y[j], walls_x[i + 1], walls_y[j + 1])
        assert union_area_in_rect(region, rect) == a


def test_contains_point_modes():
    r = Region.from_polys([square(0, 0), square(1, 0)])
    assert contains_point(r, (F(1, 2), F(1, 2)), "closed")
    assert contains_point(r, (F(1, 2), F(1, 2)), "interior")
    # shared edge: in the closed union, not interior to any single square
    assert contains_point(r, (F(1), F(1, 2)), "closed")
    assert not contains_point(r, (F(1), F(1, 2)), "interior")
    assert not contains_point(r, (F(3), F(0)), "closed")


def test_region_json_round_trip():
    r = Region.from_polys([square(0, 0), rect_poly(F(1, 3), F(0), F(2), F(5, 7))])
    back = Region.from_json(r.to_json())
    assert back == r


def test_region_clip_and_bbox():
    r = Region.from_polys([rect_poly(F(-1), F(-1), F(2), F(2))])
    assert r.bbox() == (F(-1), F(-1), F(2), F(2))
    clipped = r.clip_to_rect((F(0), F(0), F(1), F(1)))
    assert union_area(clipped) == 1
