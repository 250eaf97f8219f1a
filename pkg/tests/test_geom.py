import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sgindex.errors import DegenerateTriangle
from sgindex.geom import in_ccw_triangle, orient, orient_calls, point_in_triangle

coord = st.integers(-(1 << 30), 1 << 30)
point = st.tuples(coord, coord)


def test_orient_examples():
    assert orient((0, 0), (1, 0), (0, 1)) == 1
    assert orient((0, 0), (1, 1), (2, 2)) == 0
    assert orient((0, 0), (0, 1), (1, 0)) == -1


def test_containment_examples():
    a, b, c = (0, 0), (10, 0), (5, 9)
    assert point_in_triangle((5, 3), a, b, c).kind == "inside"
    r = point_in_triangle((5, 0), a, b, c)
    assert (r.kind, r.site) == ("on_edge", 0)
    assert point_in_triangle((20, 0), a, b, c).kind == "outside"
    r = point_in_triangle((10, 0), a, b, c)
    assert (r.kind, r.site) == ("on_vertex", 1)


def test_degenerate_triangle():
    with pytest.raises(DegenerateTriangle):
        point_in_triangle((1, 1), (0, 0), (1, 1), (2, 2))


@given(point, point, point)
def test_antisymmetry(p, q, r):
    assert orient(p, q, r) == -orient(p, r, q)


def _slow_orient(p, q, r):
    # rational barycentric form, independent of the determinant shortcut
    det = Fraction(q[0] - p[0]) * Fraction(r[1] - p[1]) - Fraction(q[1] - p[1]) * Fraction(r[0] - p[0])
    return (det > 0) - (det < 0)


def test_exact_on_random_triples():
    rng = random.Random(5)
    lim = 1 << 30
    for _ in range(20_000):
        p, q = (rng.randint(-lim, lim), rng.randint(-lim, lim)), (rng.randint(-lim, lim), rng.randint(-lim, lim))
        if rng.random() < 0.3:
            t = rng.randint(-3, 3)
            r = (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))
        else:
            r = (rng.randint(-lim, lim), rng.randint(-lim, lim))
        assert orient(p, q, r) == _slow_orient(p, q, r)


@given(point, point, point, point)
def test_fast_and_full_containment_agree(q, a, b, c):
    s = orient(a, b, c)
    if s == 0:
        return
    if s < 0:
        b, c = c, b
    full = point_in_triangle(q, a, b, c).kind
    fast = in_ccw_triangle(q, a, b, c)
    assert fast == {"outside": 0, "inside": 2}.get(full, 1)


def test_orient_is_counted():
    before = orient_calls()
    orient((0, 0), (1, 0), (0, 1))
    assert orient_calls() == before + 1
