import itertools
import random

import numpy as np
import pytest

from sgindex.errors import (BadOrientation, CoordinateOverflow, DuplicatePoint, EulerViolation, FormatError,
                            GeometryError, NonTriangleFace, NotSimple, TooSmall)
from sgindex.geom import orient
from sgindex.mesh import (_segments_cross, dual_graph, dump_tri, gen_random, load_tri, random_subdivision,
                          subdivision_faces, triangulate_complement, triangulate_polygon, validate)

T4_TEXT = "4 3\n0 0\n10 0\n5 9\n5 3\n1 2 4\n2 3 4\n3 1 4\n"


def test_t4_loads(t4):
    T = load_tri(T4_TEXT)
    assert (T.n, T.f, T.m) == (4, 3, 6)
    assert T.face_set() == t4.face_set()


def test_duplicated_face_is_euler_violation():
    text = "4 4\n0 0\n10 0\n5 9\n5 3\n1 2 4\n2 3 4\n3 1 4\n1 2 3\n"
    with pytest.raises(EulerViolation):
        load_tri(text)


@pytest.mark.parametrize("text, err", [
    ("4 3\n0 0\n10 0\n5 9\n0 0\n1 2 4\n2 3 4\n3 1 4\n", DuplicatePoint),
    ("4 3\n0 0\n10 0\n5 9\n5 3\n1 2 4\n2 3 4\n3 1\n", NonTriangleFace),
    ("4 3\n0 0\n10 0\n5 9\n5 3\n1 4 2\n2 3 4\n3 1 4\n", BadOrientation),
    ("4 3\n0 0\n2000000000 0\n5 9\n5 3\n1 2 4\n2 3 4\n3 1 4\n", CoordinateOverflow),
    ("4 3\n0 0\n10 0\n5 9\n5 3\n1 2 4\n2 3 4\n3 1 4\nextra\n", FormatError),
])
def test_validation_errors(text, err):
    with pytest.raises(err):
        load_tri(text)


def test_error_names_the_entity():
    with pytest.raises(BadOrientation, match="face 1"):
        load_tri("4 3\n0 0\n10 0\n5 9\n5 3\n1 4 2\n2 3 4\n3 1 4\n")


def test_reserialize_roundtrip():
    T = gen_random(10_000, 3)
    U = load_tri(dump_tri(T))
    pts_t = {tuple(sorted(T.points[v] for v in t)) for t in T.triangles.tolist()}
    pts_u = {tuple(sorted(U.points[v] for v in t)) for t in U.triangles.tolist()}
    assert pts_t == pts_u and sorted(T.points) == sorted(U.points)


def test_gen_small_and_deterministic():
    T = gen_random(4, 9)
    assert T.f == 3 and len({v for t in T.triangles.tolist() for v in t}) == 4
    a, b = gen_random(1000, 7), gen_random(1000, 7)
    assert a.points == b.points and (a.triangles == b.triangles).all()
    with pytest.raises(TooSmall):
        gen_random(3, 1)


@pytest.mark.parametrize("n", [4, 10, 1000])
def test_gen_valid_over_seeds(n):
    for seed in range(100 if n < 1000 else 10):
        T = gen_random(n, seed)
        validate(T.points, T.triangles, T.outer)


def test_gen_large_validates():
    T = gen_random(100_000, 1)
    U = validate(T.points, T.triangles, T.outer)
    assert U.f == 2 * U.n - 5 and U.m == 3 * U.n - 6


def test_adjacency_symmetric():
    T = gen_random(500, 2)
    adj = T.adjacency
    for t in range(T.f):
        for u in adj[t]:
            if u >= 0:
                assert t in adj[u]


def test_polygon_small_cases():
    assert triangulate_polygon([(0, 0), (4, 0), (4, 4), (0, 4)]) in ([(0, 2)], [(1, 3)])
    assert triangulate_polygon([(0, 0), (4, 0), (0, 4)]) == []
    with pytest.raises(NotSimple):
        triangulate_polygon([(0, 0), (4, 4), (4, 0), (0, 4)])


def _star_polygon(k, rng):
    # random star-shaped, hence simple, polygon around the origin
    angles = sorted(rng.sample(range(3600), k))
    pts = []
    for a in angles:
        r = rng.randint(300, 1000)
        pts.append((round(r * np.cos(a * np.pi / 1800)), round(r * np.sin(a * np.pi / 1800))))
    return pts


def test_random_50gon():
    rng = random.Random(4)
    poly = _star_polygon(50, rng)
    diags = triangulate_polygon(poly)
    assert len(diags) == 47
    for (a, b), (c, d) in itertools.combinations(diags, 2):
        if len({a, b, c, d}) == 4:
            assert not _segments_cross(poly[a], poly[b], poly[c], poly[d])


def test_diagonal_count_property():
    rng = random.Random(8)
    for k in range(3, 30):
        assert len(triangulate_polygon(_star_polygon(k, rng))) == k - 3


OUTER = [(0, 0), (1000, 0), (500, 900)]


def test_complement_one_triangle():
    T = triangulate_complement([[(400, 300), (600, 300), (500, 450)]], OUTER)
    assert T.n == 6 and T.f == 7


def test_complement_rejects_outer_vertices():
    with pytest.raises(GeometryError):
        triangulate_complement([OUTER], OUTER)


def test_complement_two_quads_respects_cycles():
    quads = [[(200, 100), (300, 100), (300, 200), (200, 200)], [(600, 100), (700, 100), (700, 200), (600, 200)]]
    T = triangulate_complement(quads, OUTER)
    cyc = [(q[i], q[(i + 1) % 4]) for q in quads for i in range(4)]
    for a, b, c in T.triangles.tolist():
        for u, v in ((a, b), (b, c), (c, a)):
            p, q = T.points[u], T.points[v]
            for r, s in cyc:
                if len({p, q, r, s}) == 4:
                    assert not _segments_cross(p, q, r, s)


def test_dual_graph_counts(t4):
    g = dual_graph(t4)
    assert g.shape == (3, 3) and g.nnz == 6
    T = gen_random(10_000, 5)
    g = dual_graph(T)
    assert g.shape[0] == T.f and g.nnz // 2 <= 3 * T.f / 2


def test_subdivision_faces_simple():
    T = gen_random(2000, 4)
    G = random_subdivision(T, 0.1, 4)
    faces = subdivision_faces(G.points, G.edges)
    n, m = G.n, len(G.edges)
    # Euler: n - m + (internal faces + outer) = 2
    assert n - m + len(faces) + 1 == 2
    for cyc in faces:
        assert len(set(cyc)) == len(cyc)
