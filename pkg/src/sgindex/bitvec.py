"""Rank/select bit vectors, plain and sparse.

Positions are 1-based in the public API. Both flavors live in a serialized
record and answer queries by reading fields from it, which lets the same
code run over an in-memory buffer or over the pair-encoded point array.

Record layout (bit offsets relative to the record start):

    mode      8     0 = plain, 1 = sparse
    length   64     number of bits n
    ones     64     number of 1s

plain:  payload (n bits padded to a multiple of 64), superblock ranks every
        512 bits, block ranks every 64 bits relative to their superblock,
        and sampled positions of every 512th one and every 512th zero.
sparse: minority bit (8), minority count m (64), low width l (8), m low
        parts of l bits, then a nested plain record holding the unary-coded
        high parts (Elias-Fano).
"""
import numpy as np

from .bitio import BitWriter, BytesSource, width_for
from .errors import EmptyBitVector, PositionOutOfRange, RankOutOfRange

PLAIN = 0
SPARSE = 1
MODES = {"plain": PLAIN, "sparse": SPARSE, PLAIN: PLAIN, SPARSE: SPARSE}

_SB = 512
_BLK = 64
_SAMPLE = 512
_BLK_W = 9

_ops = [0]


def primitive_ops() -> int:
    """Number of rank/select/access primitives evaluated so far."""
    return _ops[0]


def _as_bits(bits) -> np.ndarray:
    if isinstance(bits, str):
        return np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")
    arr = np.asarray(bits)
    if arr.dtype != np.uint8:
        arr = arr.astype(np.uint8)
    return arr


def _select_in_word(x: int, r: int) -> int:
    pos = 0
    while True:
        c = (x & 0xFF).bit_count()
        if c >= r:
            break
        r -= c
        x >>= 8
        pos += 8
    for _ in range(r - 1):
        x &= x - 1
    return pos + (x & -x).bit_length() - 1


def _write_plain(w: BitWriter, bits: np.ndarray) -> None:
    n = int(bits.size)
    ones = int(bits.sum(dtype=np.int64))
    w.write(PLAIN, 8)
    w.write(n, 64)
    w.write(ones, 64)
    nb = -(-n // _BLK)
    padded = np.zeros(nb * _BLK, dtype=np.uint8)
    padded[:n] = bits
    w.write_bits(padded)
    width = width_for(n)
    nsb = -(-n // _SB)
    per_block = padded.reshape(nb, _BLK).sum(axis=1, dtype=np.int64) if nb else np.zeros(0, np.int64)
    cum = np.concatenate([[0], np.cumsum(per_block)])  # rank before block k, k = 0..nb
    sb_ranks = cum[np.minimum(np.arange(nsb + 1) * (_SB // _BLK), nb)]
    w.write_array(sb_ranks, width)
    blk_idx = np.arange(nb + 1)
    bl = cum[blk_idx] - sb_ranks[np.minimum(blk_idx // (_SB // _BLK), nsb)]
    w.write_array(bl, _BLK_W)
    one_pos = np.flatnonzero(bits)
    zero_pos = np.flatnonzero(bits == 0)
    w.write_array(one_pos[::_SAMPLE], width)
    w.write_array(zero_pos[::_SAMPLE], width)


def _write_sparse(w: BitWriter, bits: np.ndarray) -> None:
    n = int(bits.size)
    ones = int(bits.sum(dtype=np.int64))
    minority = 1 if ones <= n - ones else 0
    pos = np.flatnonzero(bits == minority).astype(np.int64)
    m = int(pos.size)
    low = (n // m).bit_length() - 1 if m else 0
    w.write(SPARSE, 8)
    w.write(n, 64)
    w.write(ones, 64)
    w.write(minority, 8)
    w.write(m, 64)
    w.write(low, 8)
    if m:
        w.write_array(pos & ((1 << low) - 1), low)
        maxh = (n - 1) >> low
        high = np.zeros(m + maxh + 1, dtype=np.uint8)
        high[(pos >> low) + np.arange(m)] = 1
        _write_plain(w, high)


def write_bitvec(w: BitWriter, bits, mode="plain") -> None:
    """Serialize ``bits`` as a bit-vector record at the writer's position."""
    arr = _as_bits(bits)
    if arr.size == 0:
        raise EmptyBitVector("cannot build a bit vector from zero bits")
    if MODES[mode] == PLAIN:
        _write_plain(w, arr)
    else:
        _write_sparse(w, arr)


class BitVec:
    """Read-only view of a bit-vector record inside a bit source."""

    def __init__(self, src, off: int = 0):
        self.src = src
        self.off = off
        rd = src.read
        self.mode = rd(off, 8)
        self.n = rd(off + 8, 64)
        self.ones = rd(off + 72, 64)
        if self.mode == PLAIN:
            self._init_plain(off + 136)
        else:
            self.minority = rd(off + 136, 8)
            self.m = rd(off + 144, 64)
            self.low = rd(off + 208, 8)
            self._low_off = off + 216
            end = self._low_off + self.m * self.low
            if self.m:
                self.high = BitVec(src, end)
                self.maxh = (self.n - 1) >> self.low
                end = self.high.end
            self.end = end

    def _init_plain(self, p):
        n = self.n
        self._pay = p
        self._nb = -(-n // _BLK)
        self._nsb = -(-n // _SB)
        self._w = width_for(n)
        self._sb_off = p + self._nb * _BLK
        self._bl_off = self._sb_off + (self._nsb + 1) * self._w
        self._s1_off = self._bl_off + (self._nb + 1) * _BLK_W
        self._ns1 = -(-self.ones // _SAMPLE)
        self._s0_off = self._s1_off + self._ns1 * self._w
        self._ns0 = -(-(n - self.ones) // _SAMPLE)
        self.end = self._s0_off + self._ns0 * self._w

    # construction -------------------------------------------------------
    @classmethod
    def build(cls, bits, mode="plain") -> "BitVec":
        w = BitWriter()
        write_bitvec(w, bits, mode)
        return cls(BytesSource(w.to_bytes(), w.tell()), 0)

    # sizes --------------------------------------------------------------
    @property
    def length(self) -> int:
        return self.n

    def count(self, lab: int) -> int:
        return self.ones if lab else self.n - self.ones

    def size_bits(self) -> int:
        return self.end - self.off

    def overhead_bits(self) -> int:
        return self.size_bits() - self.n

    # plain internals (0-based) -------------------------------------------
    def _sb(self, k):
        return self.src.read(self._sb_off + k * self._w, self._w)

    def _bl(self, k):
        return self.src.read(self._bl_off + k * _BLK_W, _BLK_W)

    def _bit(self, i):
        if self.mode == PLAIN:
            return self.src.read(self._pay + i, 1)
        return self.minority if self._rank_minor(i + 1) - self._rank_minor(i) else 1 - self.minority

    def _rank1_plain(self, i):
        r = self._sb(i >> 9) + self._bl(i >> 6)
        k = i & 63
        if k:
            r += self.src.read(self._pay + (i & ~63), k).bit_count()
        return r

    def _select_plain(self, lab, r):
        rd = self.src.read
        w = self._w
        if lab:
            k = (r - 1) // _SAMPLE
            lo = rd(self._s1_off + k * w, w) >> 9
            hi = (rd(self._s1_off + (k + 1) * w, w) >> 9) if k + 1 < self._ns1 else self._nsb - 1

            def sbr(s):
                return self._sb(s)

            def blr(b):
                return self._bl(b)
        else:
            k = (r - 1) // _SAMPLE
            lo = rd(self._s0_off + k * w, w) >> 9
            hi = (rd(self._s0_off + (k + 1) * w, w) >> 9) if k + 1 < self._ns0 else self._nsb - 1

            def sbr(s):
                return s * _SB - self._sb(s)

            def blr(b):
                return (b & 7) * _BLK - self._bl(b)
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if sbr(mid) < r:
                lo = mid
            else:
                hi = mid - 1
        base = sbr(lo)
        blk = lo << 3
        last = min(blk + 7, self._nb - 1)
        while blk < last and base + blr(blk + 1) < r:
            blk += 1
        r -= base + blr(blk)
        word = rd(self._pay + blk * _BLK, _BLK)
        if not lab:
            word = ~word & 0xFFFFFFFFFFFFFFFF
        return blk * _BLK + _select_in_word(word, r)

    # sparse internals (0-based) ------------------------------------------
    def _low_at(self, j):
        return self.src.read(self._low_off + j * self.low, self.low)

    def _sel_minor(self, r):
        """0-based position of the r-th minority bit."""
        h = self.high._select_plain(1, r) - (r - 1)
        return (h << self.low) | self._low_at(r - 1)

    def _rank_minor(self, i):
        """Minority bits among 0-based positions < i."""
        m = self.m
        if m == 0 or i <= 0:
            return 0
        hb = i >> self.low
        if hb > self.maxh:
            return m
        if hb == 0:
            q = c = 0
        else:
            q = self.high._select_plain(0, hb) + 1
            c = q - hb
        lowi = i & ((1 << self.low) - 1)
        hsrc = self.high
        while c < m and hsrc.src.read(hsrc._pay + q, 1) and self._low_at(c) < lowi:
            c += 1
            q += 1
        return c

    def _sel_major(self, r):
        lo, hi = 0, self.m
        while lo < hi:  # count of minority elements x_j with x_j - j <= r - 1
            mid = (lo + hi) >> 1
            if self._sel_minor(mid + 1) - mid <= r - 1:
                lo = mid + 1
            else:
                hi = mid
        return r - 1 + lo

    # 0-based primitives used by the index ------------------------------------
    def rank1(self, i: int) -> int:
        """Number of 1s among the first i bits (0 <= i <= n)."""
        _ops[0] += 1
        if self.mode == PLAIN:
            return self._rank1_plain(i)
        rm = self._rank_minor(i)
        return rm if self.minority else i - rm

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def select1(self, r: int) -> int:
        """1-based position of the r-th 1."""
        return self._select(1, r)

    def select0(self, r: int) -> int:
        return self._select(0, r)

    def _select(self, lab, r):
        _ops[0] += 1
        if r < 1 or r > self.count(lab):
            raise RankOutOfRange(f"select({lab}, {r}) with {self.count(lab)} occurrences")
        if self.mode == PLAIN:
            return self._select_plain(lab, r) + 1
        if lab == self.minority:
            return self._sel_minor(r) + 1
        return self._sel_major(r) + 1

    def get(self, pos: int) -> int:
        """Bit at 1-based position pos, without range checks."""
        _ops[0] += 1
        return self._bit(pos - 1)

    # public API (1-based, checked) -------------------------------------------
    def access(self, pos: int) -> int:
        if pos < 1 or pos > self.n:
            raise PositionOutOfRange(f"position {pos} outside 1..{self.n}")
        return self.get(pos)

    def rank(self, lab: int, pos: int) -> int:
        if pos < 1 or pos > self.n:
            raise PositionOutOfRange(f"position {pos} outside 1..{self.n}")
        r1 = self.rank1(pos)
        return r1 if lab else pos - r1

    def select(self, lab: int, r: int) -> int:
        return self._select(1 if lab else 0, r)

    def to_list(self) -> list[int]:
        return [self._bit(i) for i in range(self.n)]


def bv_build(bits, mode="plain") -> BitVec:
    return BitVec.build(bits, mode)


def bv_rank(v: BitVec, lab: int, pos: int) -> int:
    return v.rank(lab, pos)


def bv_select(v: BitVec, lab: int, r: int) -> int:
    return v.select(lab, r)


class PackedArray:
    """Fixed-width unsigned integers: record = width (8), count (64), data."""

    def __init__(self, src, off: int = 0):
        self.src = src
        self.off = off
        self.width = src.read(off, 8)
        self.count = src.read(off + 8, 64)
        self._data = off + 72
        self.end = self._data + self.width * self.count

    def __len__(self):
        return self.count

    def __getitem__(self, i: int) -> int:
        if i < 0 or i >= self.count:
            raise PositionOutOfRange(f"entry {i} outside 0..{self.count - 1}")
        return self.src.read(self._data + i * self.width, self.width)

    def size_bits(self) -> int:
        return self.end - self.off


def write_packed(w: BitWriter, values, width: int | None = None) -> None:
    vals = np.asarray(values, dtype=np.int64)
    if width is None:
        width = width_for(int(vals.max())) if vals.size else 1
    w.write(width, 8)
    w.write(int(vals.size), 64)
    w.write_array(vals, width)
