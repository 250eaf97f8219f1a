import random

import numpy as np
import pytest

from sgindex.errors import OutsideHull, TagArityMismatch
from sgindex.geom import orient_calls, point_in_triangle
from sgindex.harness import oracle_locate, query_points
from sgindex.mesh import gen_random
from sgindex.pointloc import build_pl, pl_locate


def test_t4_tags(t4):
    P = build_pl(t4, [1, 0, 2])
    assert pl_locate(P, (5, 1)).face == 0 and pl_locate(P, (5, 1)).tag == 1
    assert pl_locate(P, (6, 5)).tag == 0
    # the interior vertex touches every face; the smallest id wins
    assert pl_locate(P, (5, 3)).face == 0
    with pytest.raises(OutsideHull, match="outside hull"):
        pl_locate(P, (20, 0))


def test_tag_arity(t4):
    with pytest.raises(TagArityMismatch):
        build_pl(t4, [0, 1])


def test_labels_and_rational_queries(t4):
    P = build_pl(t4, [0, 0, 0], coord=lambda l: t4.points[l - 10], labels=[10, 11, 12, 13])
    assert sorted(P.locate((5, 1)).labels) == sorted(10 + v for v in t4.triangles[0])
    # centroid of face 1 given at 3x scale
    a, b, c = (t4.points[v] for v in t4.triangles[1])
    assert P.locate((a[0] + b[0] + c[0], a[1] + b[1] + c[1]), scale=3).face == 1


@pytest.mark.parametrize("n", [2000, 20_000])
def test_matches_linear_scan(n):
    T = gen_random(n, n)
    P = build_pl(T, list(range(T.f)))
    rng = np.random.default_rng(1)
    qs = query_points(T, 300, 2).tolist()
    # vertices and edge midpoints exercise the tie rule
    for t in rng.integers(0, T.f, 100).tolist():
        a, b, c = (T.points[v] for v in T.triangles[t])
        qs.append(a)
        if (a[0] + b[0]) % 2 == 0 and (a[1] + b[1]) % 2 == 0:
            qs.append(((a[0] + b[0]) // 2, (a[1] + b[1]) // 2))
    for q in qs:
        q = tuple(q)
        hit = P.locate(q)
        assert hit.face == oracle_locate(T, q)
        assert point_in_triangle(q, *(T.points[v] for v in hit.labels)).contains


def test_orient_work_is_logarithmic():
    means = []
    for n in (2000, 32_000):
        T = gen_random(n, 3)
        P = build_pl(T, [0] * T.f)
        qs = query_points(T, 200, 4).tolist()
        before = orient_calls()
        for q in qs:
            P.locate(tuple(q))
        means.append((orient_calls() - before) / len(qs))
    # 16x more vertices adds four doublings, not a 16x cost
    assert means[1] < 2 * means[0]


def test_size_is_n_log_n_scale():
    T = gen_random(10_000, 5)
    P = build_pl(T, [0] * T.f)
    assert P.size_bits() < 200 * T.f
