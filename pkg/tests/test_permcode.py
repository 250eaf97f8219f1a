import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from sgindex.errors import CapacityExceeded, CorruptPermutation, NotAPermutation, TooSmall
from sgindex.mesh import gen_random, random_subdivision
from sgindex.permcode import (CODE_RADIX, SHAPES, CodecConfig, PairLayout, decode_faces, decode_subdivision,
                              decode_triangulation, encode_faces, encode_subdivision, encode_triangulation,
                              int_to_mixed, lehmer_rank, lehmer_unrank, minimal_group_size, mixed_to_int,
                              perm_pack, perm_unpack, synthetic_triangle)


def _faces(T):
    return {tuple(sorted(T.points[v] for v in t)) for t in T.triangles.tolist()}


def test_pack_examples():
    assert perm_pack([0, 0], 3, 2) == (0, 1, 2)
    lex = list(itertools.permutations(range(3)))
    assert perm_pack([1, 1], 3, 2) == lex[3] == (1, 2, 0)


def test_unpack_examples():
    assert perm_unpack(tuple(range(5)), 41, 0) == []
    # reversed permutation of 4 has Lehmer index 23 = 0b10111
    assert perm_unpack((3, 2, 1, 0), 2, 4) == [1, 1, 1, 0]


def test_pack_errors():
    with pytest.raises(CapacityExceeded):
        perm_pack([1] * 4, 3, 2)
    with pytest.raises(NotAPermutation):
        perm_unpack((0, 0, 1), 2, 1)


def test_pack_roundtrip_r41_k128():
    rng = random.Random(1)
    for _ in range(20):
        s = [rng.randrange(41) for _ in range(100)]
        assert perm_unpack(perm_pack(s, 128, 41), 41, 100) == s


def test_pack_roundtrip_many():
    rng = random.Random(2)
    for _ in range(1000):
        k = rng.randint(1, 30)
        radix = rng.randint(2, 50)
        count = int(math.lgamma(k + 1) / math.log(radix))
        while radix ** count > math.factorial(k):
            count -= 1
        s = [rng.randrange(radix) for _ in range(count)]
        assert perm_unpack(perm_pack(s, k, radix), radix, count) == s


@given(st.permutations(list(range(9))))
def test_lehmer_bijection(p):
    p = tuple(p)
    assert lehmer_unrank(lehmer_rank(p), 9) == p


@given(st.lists(st.integers(2, 1000), min_size=0, max_size=300), st.randoms())
def test_mixed_radix_roundtrip(radices, rnd):
    digits = [rnd.randrange(r) for r in radices]
    value = mixed_to_int(digits, radices)
    assert value < math.prod(radices)
    assert int_to_mixed(value, radices)[0] == digits


def test_shape_catalog_and_group_sizes():
    assert len(SHAPES) == CODE_RADIX == 41
    assert minimal_group_size(41) == 109 and minimal_group_size(41 * 64) == 7128
    assert math.factorial(109) >= 41 ** 109 and math.factorial(108) < 41 ** 108
    assert CodecConfig().group_size == 128 and CodecConfig("subdivision").group_size == 8192
    with pytest.raises(CapacityExceeded):
        CodecConfig(group_size=100)


@pytest.mark.parametrize("n,seed", [(2048, 1), (5000, 2), (8192, 3)])
def test_triangulation_roundtrip(n, seed):
    T = gen_random(n, seed)
    order = encode_triangulation(T)
    assert sorted(order) == list(range(n))
    assert set(order[-3:]) == set(T.outer)
    D = decode_triangulation([T.points[v] for v in order])
    assert _faces(D) == _faces(T)


def test_too_small():
    with pytest.raises(TooSmall):
        encode_triangulation(gen_random(500, 1))
    with pytest.raises(TooSmall):
        encode_subdivision(random_subdivision(gen_random(5000, 1), 0.1, 1))


def test_shuffled_order_is_rejected_or_wrong():
    T = gen_random(2048, 4)
    order = encode_triangulation(T)
    rng = random.Random(4)
    body = order[:-3]
    rng.shuffle(body)
    pts = [T.points[v] for v in body + order[-3:]]
    try:
        D = decode_triangulation(pts)
    except (CorruptPermutation, CapacityExceeded):
        return
    assert _faces(D) != _faces(T)


def test_subdivision_roundtrip():
    T = gen_random(10_000, 5)
    G = random_subdivision(T, 0.1, 5)
    order = encode_subdivision(G)
    D = decode_subdivision([G.points[v] for v in order])
    assert D.edge_points() == G.edge_points()


def test_subdivision_without_deletions_matches_triangulation():
    T = gen_random(10_000, 6)
    G = random_subdivision(T, 0.0, 6)
    order = encode_subdivision(G)
    D = decode_subdivision([G.points[v] for v in order])
    edges = {(min(T.points[a], T.points[b]), max(T.points[a], T.points[b]))
             for t in T.triangles.tolist() for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))}
    assert D.edge_points() == edges


def test_synthetic_triangle_contains_points():
    pts = [(3, 4), (100, -7), (50, 60)]
    a, b, c = synthetic_triangle(pts)
    for p in pts:
        for u, v in ((a, b), (b, c), (c, a)):
            assert (v[0] - u[0]) * (p[1] - u[1]) - (v[1] - u[1]) * (p[0] - u[0]) > 0


def _half_mesh(seed):
    T = gen_random(6000, seed)
    xs = sorted(p[0] for p in T.points)
    cut = xs[len(xs) // 2]
    faces = [t for t in T.triangles.tolist() if max(T.points[v][0] for v in t) <= cut]
    verts = sorted({v for t in faces for v in t})
    loc = {v: k for k, v in enumerate(verts)}
    return [T.points[v] for v in verts], [tuple(loc[v] for v in t) for t in faces]


def test_face_set_roundtrip():
    pts, faces = _half_mesh(7)
    order = encode_faces(pts, faces)
    tris, allp = decode_faces([pts[k] for k in order])
    got = {tuple(sorted(allp[x] for x in t)) for t in tris}
    assert {tuple(sorted(pts[x] for x in t)) for t in faces} <= got


@pytest.mark.parametrize("parity", [0, 1])
def test_pair_stable_face_roundtrip(parity):
    pts, faces = _half_mesh(8)
    rng = random.Random(parity)
    is_new = [rng.random() < 0.7 for _ in pts]
    order = encode_faces(pts, faces, PairLayout(is_new, parity))
    new_pos = [k for k, v in enumerate(order) if is_new[v]]
    # consecutive new positions pair up from index ``parity`` and are ascending
    seq = [pts[order[k]] for k in new_pos]
    assert all(seq[i] < seq[i + 1] for i in range(parity, len(seq) - 1, 2))
    tris, allp = decode_faces([pts[k] for k in order], PairLayout([is_new[v] for v in order], parity))
    got = {tuple(sorted(allp[x] for x in t)) for t in tris}
    assert {tuple(sorted(pts[x] for x in t)) for t in faces} <= got


def test_decode_walk_terminates_on_cycling_mesh():
    # a rotating-first-edge visibility walk cycles forever on this mesh
    T = gen_random(8192, 1044)
    order = encode_triangulation(T)
    assert _faces(decode_triangulation([T.points[v] for v in order])) == _faces(T)
