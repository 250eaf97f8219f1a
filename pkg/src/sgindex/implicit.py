"""Point arrays that carry their own index in the order of consecutive pairs.

Pair i (points 2i and 2i+1, 0-based) holds bit i: 0 when the pair is in
ascending lexicographic order, 1 when it is descending. The embedded stream
is the serialized index without its magic and version bytes. A graph label
is resolved by sorting its pair, so the swaps never disturb labels; this
needs the build to give each pair of consecutive graph labels ascending
points (``BuildParams(pair_stable=True)``).
"""
import numpy as np

from .bitio import BytesSource
from .errors import CapacityExceeded, DuplicatePoint, IdOutOfRange, PairLayoutError, PositionOutOfRange
from .index import MAGIC, VERSION, BuildParams, SuccinctIndex, build_index

_PREFIX_BITS = 48
_PREFIX = int.from_bytes(MAGIC + VERSION.to_bytes(2, "little"), "little")


class ImplicitArray:
    """Pair-permuted points; ``read(off, width)`` decodes ``width`` pair bits."""

    def __init__(self, points, nbits: int, overflow: bytes = b""):
        self.xy = np.asarray(points, dtype=np.int64).reshape(-1, 2)
        self.n = len(self.xy)
        self.nbits = nbits
        self.capacity = self.n // 2
        # test hook: bits past the capacity, kept outside the points
        self.overflow = BytesSource(overflow) if overflow else None
        self.comparisons = 0

    @property
    def points(self) -> list:
        return [tuple(p) for p in self.xy.tolist()]

    def _desc(self, lo: int, hi: int) -> np.ndarray:
        a = self.xy[2 * lo:2 * hi:2]
        b = self.xy[2 * lo + 1:2 * hi + 1:2]
        self.comparisons += hi - lo
        return (a[:, 0] > b[:, 0]) | ((a[:, 0] == b[:, 0]) & (a[:, 1] > b[:, 1]))

    def read(self, off: int, width: int) -> int:
        if width == 0:
            return 0
        if off < 0 or off + width > max(self.capacity, self.nbits):
            raise PositionOutOfRange(f"bits {off}..{off + width - 1} outside the stream")
        value = 0
        cut = min(off + width, self.capacity)
        if off < cut:
            value = int.from_bytes(np.packbits(self._desc(off, cut), bitorder="little").tobytes(), "little")
        if off + width > cut:
            start = max(off, self.capacity)
            extra = self.overflow.read(start - self.capacity, off + width - start)
            value |= extra << (start - off)
        return value

    def read_bit(self, t: int) -> int:
        return self.read(t, 1)

    def point_by_label(self, label: int) -> tuple:
        """Point of 1-based graph label ``label``."""
        if not 1 <= label <= self.n:
            raise IdOutOfRange(f"label {label} outside 1..{self.n}")
        k = label - 1
        if k // 2 >= self.capacity:
            return tuple(self.xy[k].tolist())
        a = tuple(self.xy[k & ~1].tolist())
        b = tuple(self.xy[k | 1].tolist())
        self.comparisons += 1
        lo, hi = (a, b) if a < b else (b, a)
        return hi if k & 1 else lo


class _Prefixed:
    """Bit source that restores the magic and version in front of an embedded stream."""

    def __init__(self, arr: ImplicitArray):
        self.arr = arr

    def read(self, off: int, width: int) -> int:
        if off >= _PREFIX_BITS:
            return self.arr.read(off - _PREFIX_BITS, width)
        head = min(width, _PREFIX_BITS - off)
        value = (_PREFIX >> off) & ((1 << head) - 1)
        if width > head:
            value |= self.arr.read(0, width - head) << head
        return value


class _Points:
    def __init__(self, arr: ImplicitArray):
        self.arr = arr

    def __getitem__(self, g: int) -> tuple:
        return self.arr.point_by_label(g + 1)

    def __len__(self):
        return self.arr.n


def implicit_encode(points, bits, allow_overflow: bool = False) -> ImplicitArray:
    """Swap pairs of ``points`` (ascending within each pair) to spell ``bits``.

    ``bits`` is a bytes object (LSB-first) or a 0/1 sequence. With
    ``allow_overflow`` the bits past floor(n/2) are kept in a side buffer so
    the query path can still be exercised; such arrays are not implicit.
    """
    xy = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    n = len(xy)
    if isinstance(bits, (bytes, bytearray)):
        arr_bits = np.unpackbits(np.frombuffer(bytes(bits), dtype=np.uint8), bitorder="little")
    else:
        arr_bits = np.asarray(bits, dtype=np.uint8)
    cap = n // 2
    if len(np.unique(xy, axis=0)) != n:
        raise DuplicatePoint("implicit arrays need pairwise distinct points")
    a, b = xy[0:2 * cap:2], xy[1:2 * cap:2]
    desc = (a[:, 0] > b[:, 0]) | ((a[:, 0] == b[:, 0]) & (a[:, 1] > b[:, 1]))
    if desc.any():
        raise PairLayoutError(f"pair {int(np.flatnonzero(desc)[0]) + 1} is not ascending")
    overflow = b""
    if len(arr_bits) > cap:
        if not allow_overflow:
            raise CapacityExceeded(f"{len(arr_bits)} index bits exceed the {cap}-bit capacity of {n} points")
        overflow = np.packbits(arr_bits[cap:], bitorder="little").tobytes()
    out = xy.copy()
    used = min(len(arr_bits), cap)
    flip = np.flatnonzero(arr_bits[:used])
    out[2 * flip], out[2 * flip + 1] = xy[2 * flip + 1], xy[2 * flip]
    return ImplicitArray(out, len(arr_bits), overflow)


def implicit_read_bit(arr: ImplicitArray, t: int) -> int:
    """Bit t (1-based) of the embedded stream."""
    if not 1 <= t <= arr.capacity:
        raise PositionOutOfRange(f"bit {t} outside 1..{arr.capacity}")
    return arr.read(t - 1, 1)


def implicit_read_field(arr: ImplicitArray, t: int, width: int) -> int:
    """``width`` bits starting at bit t (1-based), least significant first."""
    if t < 1 or t - 1 + width > max(arr.capacity, arr.nbits):
        raise PositionOutOfRange(f"field at {t} of width {width} outside the stream")
    return arr.read(t - 1, width)


def implicit_point_by_label(arr: ImplicitArray, label: int) -> tuple:
    return arr.point_by_label(label)


def implicit_build(T, params: BuildParams | None = None, allow_overflow: bool = False):
    """Pair-stable index build embedded into its own point array."""
    p = params or BuildParams(pair_stable=True)
    if not p.pair_stable:
        raise PairLayoutError("implicit builds need pair_stable=True")
    pts, blob = build_index(T, p)
    return implicit_encode(pts, blob[_PREFIX_BITS // 8:], allow_overflow)


def implicit_index(arr: ImplicitArray, cache_units: int = 0) -> SuccinctIndex:
    return SuccinctIndex(_Prefixed(arr), cache_units=cache_units)


def implicit_locate(arr: ImplicitArray, q, ix: SuccinctIndex | None = None) -> tuple:
    """Ascending 1-based graph labels of a triangle containing q, reading only ``arr``.

    ``ix`` may be a view from ``implicit_index(arr)`` kept across queries.
    """
    ix = ix or implicit_index(arr)
    return tuple(g + 1 for g in ix.locate(_Points(arr), q))
