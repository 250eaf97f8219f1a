import numpy as np
import pytest
from hypothesis import given, strategies as st

from sgindex.errors import CapacityExceeded, DuplicatePoint, PairLayoutError, PositionOutOfRange
from sgindex.harness import query_points
from sgindex.implicit import (implicit_build, implicit_encode, implicit_locate, implicit_point_by_label,
                              implicit_read_bit, implicit_read_field)
from sgindex.index import BuildParams, build_index, load_index
from sgindex.mesh import gen_random


def _sorted_pairs(n, seed=0):
    rng = np.random.default_rng(seed)
    pts = sorted({tuple(p) for p in rng.integers(0, 1000, (3 * n, 2)).tolist()})[:n]
    rng.shuffle(pts)
    pts = [tuple(p) for p in pts]
    out = []
    for i in range(0, n - 1, 2):
        out += sorted(pts[i:i + 2])
    if n % 2:
        out.append(pts[-1])
    return out


def test_all_zero_keeps_order():
    pts = _sorted_pairs(10)
    arr = implicit_encode(pts, [0] * 5)
    assert arr.points == pts


def test_all_one_swaps_every_pair():
    pts = _sorted_pairs(11)
    arr = implicit_encode(pts, [1] * 5)
    for i in range(5):
        assert arr.points[2 * i] == pts[2 * i + 1] and arr.points[2 * i + 1] == pts[2 * i]
    assert arr.points[10] == pts[10]


@given(st.lists(st.integers(0, 1), min_size=0, max_size=40), st.integers(0, 5))
def test_bits_roundtrip_and_multiset(bits, extra):
    pts = _sorted_pairs(2 * len(bits) + extra, seed=len(bits))
    arr = implicit_encode(pts, bits)
    assert sorted(arr.points) == sorted(pts)
    assert [implicit_read_bit(arr, t) for t in range(1, len(bits) + 1)] == bits
    for label in range(1, len(pts) + 1):
        assert implicit_point_by_label(arr, label) == pts[label - 1]


def test_read_field_matches_bytes():
    pts = _sorted_pairs(1000, 3)
    blob = bytes(np.random.default_rng(4).integers(0, 256, 62).tolist())
    arr = implicit_encode(pts, blob)
    value = int.from_bytes(blob, "little")
    for t, w in [(1, 8), (5, 17), (100, 64), (490, 7)]:
        assert implicit_read_field(arr, t, w) == (value >> (t - 1)) & ((1 << w) - 1)


def test_errors():
    pts = _sorted_pairs(8)
    with pytest.raises(CapacityExceeded):
        implicit_encode(pts, [0] * 5)
    with pytest.raises(DuplicatePoint):
        implicit_encode([(0, 0), (0, 0)], [0])
    with pytest.raises(PairLayoutError):
        implicit_encode([(1, 0), (0, 0)], [0])
    arr = implicit_encode(pts, [1, 0, 1])
    with pytest.raises(PositionOutOfRange):
        implicit_read_bit(arr, 5)
    with pytest.raises(PositionOutOfRange):
        implicit_read_field(arr, 3, 3)


def test_pair_stable_build_has_ascending_pairs():
    T = gen_random(3000, 2)
    pts, _ = build_index(T, BuildParams(pair_stable=True))
    for i in range(0, len(pts) - 1, 2):
        assert pts[i] < pts[i + 1]


def test_capacity_error_at_default_size():
    # the index is several bits per vertex, so half a bit per vertex cannot hold it
    with pytest.raises(CapacityExceeded):
        implicit_build(gen_random(3000, 2))


def test_locate_through_pairs_matches_index():
    T = gen_random(3000, 6)
    params = BuildParams(pair_stable=True, s0=512)
    pts, blob = build_index(T, params)
    arr = implicit_build(T, params, allow_overflow=True)
    ix = load_index(blob)
    for q in query_points(T, 20, 1).tolist():
        assert implicit_locate(arr, q) == tuple(g + 1 for g in ix.locate(pts, q))
