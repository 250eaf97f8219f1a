import random

import pytest
from hypothesis import given, strategies as st

from sgindex.bitio import BitWriter, BytesSource
from sgindex.bitvec import (BitVec, PackedArray, bv_build, bv_rank, bv_select, primitive_ops, write_bitvec,
                            write_packed)
from sgindex.errors import EmptyBitVector, PositionOutOfRange, RankOutOfRange

B = [1, 0, 1, 1, 0]


@pytest.mark.parametrize("mode", ["plain", "sparse"])
def test_hand_examples(mode):
    v = bv_build(B, mode)
    assert v.length == 5 and v.count(1) == 3
    assert bv_rank(v, 1, 3) == 2
    assert bv_rank(v, 0, 5) == 2
    assert bv_select(v, 0, 2) == 5
    assert bv_select(v, 1, 1) == 1


def test_all_zero_sparse():
    v = bv_build([0] * 5, "sparse")
    assert v.count(1) == 0
    with pytest.raises(RankOutOfRange):
        bv_select(v, 1, 1)
    assert bv_select(v, 0, 5) == 5


def test_empty_rejected():
    with pytest.raises(EmptyBitVector):
        bv_build([], "plain")


@pytest.mark.parametrize("mode", ["plain", "sparse"])
def test_range_errors(mode):
    v = bv_build(B, mode)
    with pytest.raises(PositionOutOfRange):
        bv_rank(v, 1, 0)
    with pytest.raises(PositionOutOfRange):
        bv_rank(v, 1, 6)
    with pytest.raises(PositionOutOfRange):
        v.access(6)
    with pytest.raises(RankOutOfRange):
        bv_select(v, 1, 4)


@pytest.mark.parametrize("mode", ["plain", "sparse"])
def test_random_vs_naive(mode):
    rng = random.Random(7)
    bits = [1 if rng.random() < 0.3 else 0 for _ in range(10_000)]
    v = bv_build(bits, mode)
    prefix = [0]
    for b in bits:
        prefix.append(prefix[-1] + b)
    ones = [i + 1 for i, b in enumerate(bits) if b]
    zeros = [i + 1 for i, b in enumerate(bits) if not b]
    for _ in range(1000):
        p = rng.randint(1, len(bits))
        assert bv_rank(v, 1, p) == prefix[p]
        assert bv_rank(v, 0, p) == p - prefix[p]
        r = rng.randint(1, len(ones))
        assert bv_select(v, 1, r) == ones[r - 1]
        r = rng.randint(1, len(zeros))
        assert bv_select(v, 0, r) == zeros[r - 1]


def test_sparse_smaller_at_low_density():
    rng = random.Random(3)
    bits = [1 if rng.random() < 0.01 else 0 for _ in range(1_000_000)]
    assert bv_build(bits, "sparse").size_bits() < bv_build(bits, "plain").size_bits()


@given(st.lists(st.booleans(), min_size=1, max_size=3000), st.sampled_from(["plain", "sparse"]))
def test_rank_select_identities(bits, mode):
    bits = [int(b) for b in bits]
    v = bv_build(bits, mode)
    n = len(bits)
    for lab in (0, 1):
        for r in range(1, v.count(lab) + 1, max(1, v.count(lab) // 40)):
            assert bv_rank(v, lab, bv_select(v, lab, r)) == r
    for p in range(1, n + 1, max(1, n // 60)):
        assert bv_rank(v, 0, p) + bv_rank(v, 1, p) == p
        for lab in (0, 1):
            r = bv_rank(v, lab, p)
            if r:
                s = bv_select(v, lab, r)
                assert s <= p
                assert (s == p) == (v.access(p) == lab)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=500), st.integers(0, 11))
def test_record_reads_at_any_offset(bits, lead):
    w = BitWriter()
    if lead:
        w.write(0, lead)
    write_bitvec(w, bits, "sparse")
    write_bitvec(w, bits, "plain")
    src = BytesSource(w.to_bytes())
    a = BitVec(src, lead)
    b = BitVec(src, a.end)
    assert a.to_list() == bits == b.to_list()
    assert b.end == w.tell()


def test_plain_overhead_at_2_20():
    rng = random.Random(11)
    bits = [rng.getrandbits(1) for _ in range(1 << 20)]
    v = bv_build(bits, "plain")
    assert v.overhead_bits() <= 0.35 * v.length


def test_primitive_counter():
    v = bv_build(B, "plain")
    before = primitive_ops()
    v.rank1(3)
    v.select1(2)
    assert primitive_ops() - before == 2


def test_packed_array():
    w = BitWriter()
    write_packed(w, [5, 0, 1023, 7])
    p = PackedArray(BytesSource(w.to_bytes()))
    assert p.width == 10 and [p[i] for i in range(len(p))] == [5, 0, 1023, 7]
    with pytest.raises(PositionOutOfRange):
        p[4]
