"""Exact integer predicates.

Points are plain ``(x, y)`` tuples of Python ints, so every determinant is
evaluated exactly. A global counter records orientation tests; the query
instrumentation reads it before and after a call.
"""
from typing import NamedTuple

from .errors import CoordinateOverflow, DegenerateTriangle

Point = tuple[int, int]

COORD_LIMIT = 1 << 30

_counter = [0]


def orient_calls() -> int:
    """Total number of orientation tests performed so far."""
    return _counter[0]


def add_orient_calls(k: int) -> None:
    _counter[0] += k


def orient(p: Point, q: Point, r: Point) -> int:
    """Sign of the signed area of (p, q, r): +1 for a left turn."""
    _counter[0] += 1
    d = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (d > 0) - (d < 0)


def area2(p: Point, q: Point, r: Point) -> int:
    """Twice the signed area of (p, q, r); not counted as an orientation test."""
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def check_coord(p: Point, index: int = -1) -> None:
    if abs(p[0]) > COORD_LIMIT or abs(p[1]) > COORD_LIMIT:
        raise CoordinateOverflow(f"point {index} has a coordinate beyond 2^30: {p}")


class Containment(NamedTuple):
    """Result of a closed point-in-triangle test.

    ``kind`` is one of "inside", "on_edge", "on_vertex", "outside". For edges
    ``site`` is 0 for ab, 1 for bc, 2 for ca; for vertices it is 0, 1, 2 for
    a, b, c.
    """
    kind: str
    site: int | None = None

    @property
    def contains(self) -> bool:
        return self.kind != "outside"


INSIDE = Containment("inside")
OUTSIDE = Containment("outside")


def point_in_triangle(q: Point, a: Point, b: Point, c: Point) -> Containment:
    """Closed containment of q in triangle abc (either orientation)."""
    s = orient(a, b, c)
    if s == 0:
        raise DegenerateTriangle(f"collinear triangle {a} {b} {c}")
    d0 = orient(a, b, q) * s
    d1 = orient(b, c, q) * s
    d2 = orient(c, a, q) * s
    if d0 < 0 or d1 < 0 or d2 < 0:
        return OUTSIDE
    zeros = (d0 == 0) + (d1 == 0) + (d2 == 0)
    if zeros == 0:
        return INSIDE
    if zeros == 1:
        return Containment("on_edge", 0 if d0 == 0 else 1 if d1 == 0 else 2)
    # two zero edges meet at a vertex: ab & ca -> a, ab & bc -> b, bc & ca -> c
    if d0 == 0 and d2 == 0:
        return Containment("on_vertex", 0)
    if d0 == 0:
        return Containment("on_vertex", 1)
    return Containment("on_vertex", 2)


def in_ccw_triangle(q: Point, a: Point, b: Point, c: Point) -> int:
    """Fast closed test for a CCW triangle: 2 strictly inside, 1 on boundary, 0 outside."""
    d0 = orient(a, b, q)
    if d0 < 0:
        return 0
    d1 = orient(b, c, q)
    if d1 < 0:
        return 0
    d2 = orient(c, a, q)
    if d2 < 0:
        return 0
    return 2 if d0 and d1 and d2 else 1
