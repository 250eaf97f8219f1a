"""Bit-granular writer and readers.

Bits are numbered from 0 and stored least-significant-bit first inside
little-endian bytes, so a field of ``width`` bits at offset ``off`` is
``(int.from_bytes(buf) >> off) & mask``. Every structure in the index is read
through an object exposing ``read(off, width)``; the implicit point array
offers the same method.
"""
import numpy as np

_FLUSH = 1 << 12


class BitWriter:
    def __init__(self):
        self._chunks = []
        self._acc = 0
        self._acc_len = 0
        self._len = 0

    def tell(self) -> int:
        return self._len

    def _flush(self):
        if self._acc_len:
            nbytes = (self._acc_len + 7) >> 3
            raw = np.frombuffer(self._acc.to_bytes(nbytes, "little"), dtype=np.uint8)
            self._chunks.append(np.unpackbits(raw, bitorder="little")[: self._acc_len])
            self._acc = 0
            self._acc_len = 0

    def write(self, value: int, width: int) -> None:
        if width == 0:
            if value:
                raise ValueError("nonzero value in a zero-width field")
            return
        if value < 0 or value >> width:
            raise ValueError(f"value {value} does not fit in {width} bits")
        self._acc |= value << self._acc_len
        self._acc_len += width
        self._len += width
        if self._acc_len >= _FLUSH:
            self._flush()

    def write_bits(self, bits) -> None:
        """Append a 0/1 array."""
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.size == 0:
            return
        self._flush()
        self._chunks.append(arr.copy())
        self._len += arr.size

    def write_array(self, values, width: int) -> None:
        """Append each value as a ``width``-bit field."""
        vals = np.asarray(values, dtype=np.int64)
        if vals.size == 0 or width == 0:
            if width == 0 and vals.size and vals.any():
                raise ValueError("nonzero value in a zero-width field")
            return
        if width > 62:
            for v in vals.tolist():
                self.write(int(v), width)
            return
        if vals.min() < 0 or (int(vals.max()) >> width):
            raise ValueError(f"array values do not fit in {width} bits")
        self._flush()
        shifts = np.arange(width, dtype=np.int64)
        bits = ((vals[:, None] >> shifts[None, :]) & 1).astype(np.uint8).ravel()
        self._chunks.append(bits)
        self._len += bits.size

    def pad_to(self, multiple: int) -> None:
        extra = (-self._len) % multiple
        if extra:
            self.write(0, extra)

    def bits(self) -> np.ndarray:
        self._flush()
        if not self._chunks:
            return np.zeros(0, dtype=np.uint8)
        return np.concatenate(self._chunks)

    def to_bytes(self) -> bytes:
        return np.packbits(self.bits(), bitorder="little").tobytes()


class BytesSource:
    """Random-access bit reader over a bytes object."""

    def __init__(self, buf: bytes, nbits: int | None = None):
        self.buf = bytes(buf)
        self.nbits = len(self.buf) * 8 if nbits is None else nbits

    def read(self, off: int, width: int) -> int:
        if width == 0:
            return 0
        b = off >> 3
        chunk = self.buf[b : (off + width + 7) >> 3]
        return (int.from_bytes(chunk, "little") >> (off & 7)) & ((1 << width) - 1)

    def read_bit(self, off: int) -> int:
        return (self.buf[off >> 3] >> (off & 7)) & 1


def width_for(max_value: int) -> int:
    """Bits needed to store integers in [0, max_value]."""
    return max(1, int(max_value).bit_length())
