"""Connectivity stored purely in the order of a point set.

The encoder peels the triangulation in rounds: each round removes a greedy
independent set of interior vertices of degree at most 6 and retriangulates
their holes. Every removed vertex yields an insertion code (one of 41 shapes
of the hole's dual tree, rooted at the hole triangle containing the vertex).
All codes form one mixed-radix integer that is written into the arrangement
of the removed vertices: each removal round is a block, and within a block
every position carries a digit (its rank among the elements from there to
the end of the block). The round count and sizes live in the last digits of
the finest block, so the decoder can find block boundaries before anything
else.

Output layout: coarsest block first, finest block last, then (in plain
triangulation mode) the three outer vertices.
"""
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import gmpy2
import numpy as np
from sortedcontainers import SortedList

from .errors import (CapacityExceeded, CorruptPermutation, GeometryError, InternalCapacity,
                     NotAPermutation, PairLayoutError, TooSmall)
from .geom import add_orient_calls, orient
from .mesh import (Subdivision, Triangulation, compute_adjacency, constrained_triangulation,
                   subdivision_faces)

CODE_RADIX = 41
DEFAULT_GROUP = {"triangulation": 128, "subdivision": 8192}
PAYLOAD_RATE = {"triangulation": CODE_RADIX, "subdivision": CODE_RADIX * 64}
DEFAULT_MIN_N = {"triangulation": 1024, "subdivision": 8192}


class PayloadSymbol(NamedTuple):
    insertion_code: int
    edge_flags: int = 0


# -- factorial number system ---------------------------------------------------

def lehmer_rank(perm) -> int:
    """Lexicographic index of a permutation of 0..k-1."""
    k = len(perm)
    seen = SortedList()
    digits = [0] * k
    for i in range(k - 1, -1, -1):
        x = perm[i]
        digits[i] = seen.bisect_left(x)
        seen.add(x)
    value = gmpy2.mpz(0)
    for i, d in enumerate(digits):
        value = value * (k - i) + d
    return int(value)


def lehmer_unrank(index: int, k: int) -> tuple:
    digits = [0] * k
    for i in range(k - 1, -1, -1):
        index, digits[i] = divmod(index, k - i)
    pool = SortedList(range(k))
    return tuple(pool.pop(d) for d in digits)


def _check_perm(p) -> None:
    k = len(p)
    if sorted(p) != list(range(k)):
        raise NotAPermutation(f"not a permutation of 0..{k - 1}")


def perm_pack(symbols, k: int, radix: int) -> tuple:
    """Permutation of 0..k-1 whose Lehmer index is the value of ``symbols``.

    Symbols are radix-``radix`` digits, least significant first.
    """
    if radix ** len(symbols) > math.factorial(k):
        raise CapacityExceeded(f"{len(symbols)} radix-{radix} symbols exceed {k}!")
    value = mixed_to_int(list(symbols), [radix] * len(symbols))
    return lehmer_unrank(value, k)


def perm_unpack(p, radix: int, count: int) -> list:
    _check_perm(p)
    if radix ** count > math.factorial(len(p)):
        raise CapacityExceeded(f"{count} radix-{radix} symbols exceed {len(p)}!")
    value = lehmer_rank(p)
    digits, _ = int_to_mixed(value, [radix] * count, allow_rest=True)
    return digits


@lru_cache(maxsize=None)
def minimal_group_size(rate: int) -> int:
    """Smallest k with k! >= rate**k, by exact integer comparison."""
    k, fact, power = 1, gmpy2.mpz(1), gmpy2.mpz(rate)
    while fact < power:
        k += 1
        fact *= k
        power *= rate
    return k


@dataclass(frozen=True)
class CodecConfig:
    mode: str = "triangulation"
    group_size: int = 0
    min_n: int = 0

    def __post_init__(self):
        if self.mode not in DEFAULT_GROUP:
            raise ValueError(f"unknown codec mode {self.mode!r}")
        if not self.group_size:
            object.__setattr__(self, "group_size", DEFAULT_GROUP[self.mode])
        if not self.min_n:
            object.__setattr__(self, "min_n", DEFAULT_MIN_N[self.mode])
        need = minimal_group_size(PAYLOAD_RATE[self.mode])
        if self.group_size < need:
            raise CapacityExceeded(f"group size {self.group_size} below the self-financing {need}")


# -- mixed radix big integers ----------------------------------------------------

_LEAF = 48


def _m2i(d, r, lo, hi):
    if hi - lo <= _LEAF:
        v, p = 0, 1
        for i in range(hi - 1, lo - 1, -1):
            v = v * r[i] + d[i]
        for i in range(lo, hi):
            p *= r[i]
        return gmpy2.mpz(v), gmpy2.mpz(p)
    mid = (lo + hi) // 2
    vl, pl = _m2i(d, r, lo, mid)
    vh, ph = _m2i(d, r, mid, hi)
    return vl + pl * vh, pl * ph


def mixed_to_int(digits, radices) -> int:
    """Value of digits (least significant first) under per-position radices."""
    if not radices:
        return 0
    return int(_m2i(digits, radices, 0, len(radices))[0])


def _products(r, lo, hi, memo):
    if hi - lo <= _LEAF:
        p = 1
        for i in range(lo, hi):
            p *= r[i]
        memo[lo, hi] = gmpy2.mpz(p)
    else:
        mid = (lo + hi) // 2
        memo[lo, hi] = _products(r, lo, mid, memo) * _products(r, mid, hi, memo)
    return memo[lo, hi]


def _i2m(value, r, lo, hi, out, memo):
    if hi - lo <= _LEAF:
        value = int(value)
        for i in range(lo, hi):
            value, out[i] = divmod(value, r[i])
        return
    mid = (lo + hi) // 2
    q, rem = gmpy2.f_divmod(value, memo[lo, mid])
    _i2m(rem, r, lo, mid, out, memo)
    _i2m(q, r, mid, hi, out, memo)


def int_to_mixed(value: int, radices, allow_rest: bool = False):
    """Digits of ``value`` and the quotient left above the last radix."""
    n = len(radices)
    if n == 0:
        rest = gmpy2.mpz(value)
    else:
        memo = {}
        total = _products(radices, 0, n, memo)
        rest, low = gmpy2.f_divmod(gmpy2.mpz(value), total)
        out = [0] * n
        _i2m(low, radices, 0, n, out, memo)
    if rest and not allow_rest:
        raise CapacityExceeded("value does not fit the radix sequence")
    return (out if n else []), int(rest)


# -- insertion configuration catalog ------------------------------------------------

def _slot_seqs(nslots: int, budget: int):
    if nslots == 0:
        yield (), 0
        return
    for bits, used in _slot_seqs(nslots - 1, budget):
        yield (0,) + bits, used
    if budget >= 1:
        for cbits, cused in _slot_seqs(2, budget - 1):
            for bits, used in _slot_seqs(nslots - 1, budget - 1 - cused):
                yield (1,) + cbits + bits, 1 + cused + used


SHAPES = [bits for bits, _ in _slot_seqs(3, 3)]
SHAPE_INDEX = {bits: i for i, bits in enumerate(SHAPES)}
assert len(SHAPES) == CODE_RADIX, len(SHAPES)


def _shape_steps(bits) -> tuple:
    """Flatten a shape into (parent index, slot offset) steps in DFS order."""
    steps = []
    pos = 0

    def visit(me, root):
        nonlocal pos
        for off in ((0, 1, 2) if root else (1, 2)):
            b = bits[pos]
            pos += 1
            if b:
                steps.append((me, off))
                visit(len(steps), False)

    visit(0, True)
    return tuple(steps)


SHAPE_STEPS = [_shape_steps(bits) for bits in SHAPES]


# -- dynamic triangle mesh -----------------------------------------------------------

class DynMesh:
    """Mutable triangulation; triangles are stored lex-min vertex first, CCW."""

    def __init__(self, P, lr):
        self.P = P
        self.lr = lr
        self.V = []
        self.N = []
        self.vt = [-1] * len(P)
        self.last_star = None
        self._rng = random.Random(len(P))

    @classmethod
    def from_triangles(cls, P, lr, tris, adj):
        m = cls(P, lr)
        for (a, b, c), (na, nb, nc) in zip(tris, adj):
            t = m.add(a, b, c, na, nb, nc)
            m.vt[a] = m.vt[b] = m.vt[c] = t
        return m

    def add(self, a, b, c, na, nb, nc) -> int:
        lr = self.lr
        la, lb, lc = lr[a], lr[b], lr[c]
        t = len(self.V)
        if la < lb and la < lc:
            self.V.append((a, b, c))
            self.N.append([na, nb, nc])
        elif lb < lc:
            self.V.append((b, c, a))
            self.N.append([nb, nc, na])
        else:
            self.V.append((c, a, b))
            self.N.append([nc, na, nb])
        return t

    def key(self, t):
        lr = self.lr
        a, b, c = self.V[t]
        return lr[a], lr[b], lr[c]

    def relink(self, x, u, w, t) -> None:
        """In triangle x, point the edge u->w at triangle t."""
        if x < 0:
            return
        tv = self.V[x]
        for j in range(3):
            if tv[j] == u and tv[j - 2] == w:
                self.N[x][j] = t
                return
        raise CorruptPermutation("inconsistent neighbor link")

    def star(self, v):
        """Ring vertices (CCW), star triangles, and triangles beyond each ring edge."""
        V, N = self.V, self.N
        t0 = t = self.vt[v]
        ring, star, beyond = [], [], []
        while True:
            tv = V[t]
            i = tv.index(v)
            ring.append(tv[i - 2])
            star.append(t)
            beyond.append(N[t][i - 2])
            t = N[t][i - 1]
            if t == t0:
                return ring, star, beyond
            if t < 0:
                raise GeometryError(f"vertex {v} lies on the outer face")

    def remove(self, v, new_deg_edges=None) -> list:
        """Delete interior vertex v, ear-clip its hole; returns the new triangle ids."""
        ring, star, beyond = self.star(v)
        self.last_star = (ring, star)
        d = len(ring)
        P = self.P
        V, N = self.V, self.N
        succ = list(range(1, d)) + [0]
        new = []
        open_edges = {}
        for tri in _ear_clip([P[x] for x in ring]):
            t = len(V)
            nb = [-1, -1, -1]
            for e in (0, 1, 2):
                u, w = tri[e], tri[e - 2]
                if succ[u] == w:
                    x = beyond[u]
                    nb[e] = x
                    if x >= 0:
                        nx = N[x]
                        nx[nx.index(star[u])] = t
                else:
                    other = open_edges.pop((ring[w], ring[u]), None)
                    if other is None:
                        open_edges[ring[u], ring[w]] = (t, e)
                    else:
                        ot, oe = other
                        nb[e] = ot
                        N[ot][oe] = t
                        if new_deg_edges is not None:
                            new_deg_edges.append((ring[u], ring[w]))
            V.append((ring[tri[0]], ring[tri[1]], ring[tri[2]]))
            N.append(nb)
            new.append(t)
        for t in star:
            V[t] = None
        vt = self.vt
        for t in new:
            self._normalize(t)
            for x in V[t]:
                vt[x] = t
        vt[v] = -1
        return new

    def _normalize(self, t) -> None:
        """Rotate triangle t so its lex-min vertex comes first."""
        lr = self.lr
        a, b, c = self.V[t]
        la, lb, lc = lr[a], lr[b], lr[c]
        if la < lb and la < lc:
            return
        nb = self.N[t]
        if lb < lc:
            self.V[t] = (b, c, a)
            self.N[t] = [nb[1], nb[2], nb[0]]
        else:
            self.V[t] = (c, a, b)
            self.N[t] = [nb[2], nb[0], nb[1]]

    def locate(self, q, t):
        """Walk to a triangle whose closed region holds q; returns (t, zero-edge slot or -1)."""
        V, N, P = self.V, self.N, self.P
        qx, qy = q
        # a random first edge per triangle keeps the walk from cycling
        pick = self._rng.randrange
        calls = 0
        while True:
            tv = V[t]
            moved = False
            zero = -1
            step = pick(3)
            for s in range(3):
                k = (s + step) % 3
                ax, ay = P[tv[k]]
                bx, by = P[tv[k - 2]]
                d = (bx - ax) * (qy - ay) - (by - ay) * (qx - ax)
                calls += 1
                if d < 0:
                    nt = N[t][k]
                    if nt < 0:
                        add_orient_calls(calls)
                        raise CorruptPermutation("point lies outside the outer triangle")
                    t = nt
                    moved = True
                    break
                if d == 0:
                    zero = k
            if not moved:
                add_orient_calls(calls)
                return t, zero

    def shape_of(self, root, hole) -> tuple:
        N = self.N
        bits = []

        def visit(t, entry):
            nb = N[t]
            for k in ((0, 1, 2) if entry < 0 else ((entry + 1) % 3, (entry + 2) % 3)):
                u = nb[k]
                if u in hole:
                    bits.append(1)
                    visit(u, N[u].index(t))
                else:
                    bits.append(0)

        visit(root, -1)
        return tuple(bits)

    def apply_shape(self, root, code, claimed) -> list:
        N, V = self.N, self.V
        if root in claimed:
            raise CorruptPermutation("two vertices claim one triangle")
        claimed.add(root)
        hole = [root]
        entry = [-1]
        for me, off in SHAPE_STEPS[code]:
            t = hole[me]
            e = entry[me]
            u = N[t][off if e < 0 else (e + off) % 3]
            if u < 0 or u in claimed or V[u] is None:
                raise CorruptPermutation("insertion code leaves the mesh")
            claimed.add(u)
            hole.append(u)
            entry.append(N[u].index(t))
        return hole

    def insert(self, v, hole) -> None:
        """Replace the hole's triangles by a fan around v (v must see every boundary edge)."""
        V, N, P, lr = self.V, self.N, self.P, self.lr
        bnd = {}
        for t in hole:
            tv, nb = V[t], N[t]
            for k in (0, 1, 2):
                x = nb[k]
                if x not in hole:
                    bnd[tv[k]] = (tv[k - 2], x, t)
        h = len(hole) + 2
        if len(bnd) != h:
            raise CorruptPermutation("hole boundary is not a simple cycle")
        cyc = [next(iter(bnd))]
        for _ in range(h - 1):
            cyc.append(bnd[cyc[-1]][0])
        if bnd[cyc[-1]][0] != cyc[0] or len(set(cyc)) != h:
            raise CorruptPermutation("hole boundary is not a simple cycle")
        px, py = P[v]
        for i in range(h):
            ax, ay = P[cyc[i]]
            bx, by = P[cyc[i - h + 1]]
            if (ax - px) * (by - py) - (ay - py) * (bx - px) <= 0:
                add_orient_calls(i + 1)
                raise CorruptPermutation("inserted vertex does not see its hole boundary")
        add_orient_calls(h)
        base = len(V)
        lv = lr[v]
        for i in range(h):
            a = cyc[i]
            b, x, old = bnd[a]
            t = base + i
            prev_t, next_t = base + (i - 1) % h, base + (i + 1) % h
            la, lb = lr[a], lr[b]
            if lv < la and lv < lb:
                V.append((v, a, b))
                N.append([prev_t, x, next_t])
            elif la < lb:
                V.append((a, b, v))
                N.append([x, next_t, prev_t])
            else:
                V.append((b, v, a))
                N.append([next_t, prev_t, x])
            if x >= 0:
                nx = N[x]
                nx[nx.index(old)] = t
        for t in hole:
            V[t] = None
        vt = self.vt
        for i in range(h):
            vt[cyc[i]] = base + i
        vt[v] = base


def _ear_clip(pts) -> list:
    idx = list(range(len(pts)))
    out = []
    while len(idx) > 3:
        m = len(idx)
        for s in range(m):
            i0, i1, i2 = idx[s - 1], idx[s], idx[(s + 1) % m]
            ax, ay = pts[i0]
            bx, by = pts[i1]
            cx, cy = pts[i2]
            if (bx - ax) * (cy - ay) - (by - ay) * (cx - ax) <= 0:
                continue
            for j in idx:
                if j != i0 and j != i1 and j != i2:
                    px, py = pts[j]
                    if ((bx - ax) * (py - ay) - (by - ay) * (px - ax) >= 0
                            and (cx - bx) * (py - by) - (cy - by) * (px - bx) >= 0
                            and (ax - cx) * (py - cy) - (ay - cy) * (px - cx) >= 0):
                        break
            else:
                out.append((i0, i1, i2))
                del idx[s]
                break
        else:
            raise GeometryError("hole polygon has no ear")
    out.append(tuple(idx))
    return out


# -- helpers -------------------------------------------------------------------------

def lex_ranks(points) -> list:
    xy = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    order = np.lexsort((xy[:, 1], xy[:, 0]))
    r = np.empty(len(xy), dtype=np.int64)
    r[order] = np.arange(len(xy))
    return r.tolist()


def hilbert_keys(xy: np.ndarray, bits: int = 16) -> np.ndarray:
    xy = np.asarray(xy, dtype=np.int64).reshape(-1, 2)
    if len(xy) == 0:
        return np.zeros(0, dtype=np.int64)
    lo = xy.min(axis=0)
    span = int((xy.max(axis=0) - lo).max()) + 1
    shift = max(0, span.bit_length() - bits)
    x = (xy[:, 0] - lo[0]) >> shift
    y = (xy[:, 1] - lo[1]) >> shift
    d = np.zeros(len(xy), dtype=np.int64)
    s = 1 << (bits - 1)
    while s > 0:
        rx = ((x & s) > 0).astype(np.int64)
        ry = ((y & s) > 0).astype(np.int64)
        d += s * s * ((3 * rx) ^ ry)
        swap = ry == 0
        flip = swap & (rx == 1)
        x = np.where(flip, s - 1 - x, x)
        y = np.where(flip, s - 1 - y, y)
        x, y = np.where(swap, y, x), np.where(swap, x, y)
        s >>= 1
    return d


def synthetic_triangle(points) -> list:
    """Canonical bounding triangle strictly containing every point."""
    xy = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    xmin, ymin = (int(v) for v in xy.min(axis=0))
    xmax, ymax = (int(v) for v in xy.max(axis=0))
    w = max(xmax - xmin, ymax - ymin) + 1
    tri = [(xmin - 3 * w, ymin - w), (xmax + 3 * w, ymin - w), ((xmin + xmax) // 2, ymax + 3 * w)]
    for p in ((xmin, ymin), (xmax, ymin), (xmin, ymax), (xmax, ymax)):
        assert all(orient(tri[i], tri[(i + 1) % 3], p) > 0 for i in range(3))
    return tri


def wrap_faces(points, faces) -> np.ndarray:
    """Triangles over points + synthetic triangle (ids n..n+2) that keep every given face."""
    n = len(points)
    allp = list(points) + synthetic_triangle(points)
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    segs = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]],
                           np.array([[n, n + 1], [n + 1, n + 2], [n + 2, n]])])
    segs = np.unique(np.sort(segs, axis=1), axis=0)
    return constrained_triangulation(np.array(allp, dtype=np.int64), segs)


def _gamma(x: int, out: list) -> None:
    L = x.bit_length()
    out.extend([0] * (L - 1))
    out.extend((x >> (L - 1 - i)) & 1 for i in range(L))


def _colex_unrank(d: int):
    j = (1 + math.isqrt(1 + 8 * d)) // 2
    while j * (j - 1) // 2 > d:
        j -= 1
    while (j + 1) * j // 2 <= d:
        j += 1
    return d - j * (j - 1) // 2, j


# -- block plan ------------------------------------------------------------------------

@dataclass
class PairLayout:
    """Pair-stable arrangement: ``is_new`` per vertex id (encoder) or per position (decoder)."""
    is_new: list
    parity: int = 0
    prev_point: tuple | None = None


@dataclass
class _Block:
    start: int
    end: int
    new: list = field(default_factory=list)
    dup: list = field(default_factory=list)
    lead: int = -1
    trail: int = -1
    items: list = field(default_factory=list)
    dup_items: list = field(default_factory=list)


def _plan(sizes, is_new, pairs: bool, parity: int):
    """Block structure shared by encoder and decoder.

    Returns (blocks, straddles) where straddles are (left_pos, right_pos,
    left_block, right_block) for pairs split across blocks.
    """
    blocks = []
    pos = 0
    block_of = []
    for b, s in enumerate(sizes):
        blk = _Block(pos, pos + s)
        for p in range(pos, pos + s):
            (blk.new if is_new[p] else blk.dup).append(p)
            block_of.append(b)
        if blk.new and blk.new[-1] != pos + len(blk.new) - 1:
            raise CorruptPermutation("new vertices do not lead their block")
        blk.dup_items = [(p,) for p in blk.dup]
        blocks.append(blk)
        pos += s
    newpos = [p for blk in blocks for p in blk.new]
    c = len(newpos)
    straddles = []
    if not pairs:
        for blk in blocks:
            blk.items = [(p,) for p in blk.new]
        return blocks, straddles
    i = 0
    if parity and c:
        blocks[block_of[newpos[0]]].lead = newpos[0]
        i = 1
    while i + 1 < c:
        a, b = newpos[i], newpos[i + 1]
        ba, bb = block_of[a], block_of[b]
        if ba == bb:
            blocks[ba].items.append((a, b))
        else:
            blocks[ba].trail = a
            blocks[bb].lead = b
            straddles.append((a, b, ba, bb))
        i += 2
    if i < c:
        blocks[block_of[newpos[i]]].trail = newpos[i]
    return blocks, straddles


def _suffix_digits(items, key):
    sl = SortedList()
    digits, radices = [], []
    for it in reversed(items):
        if len(it) == 1:
            x = key[it[0]]
            sl.add(x)
            digits.append(sl.bisect_left(x))
            radices.append(len(sl))
        else:
            a, b = key[it[0]], key[it[1]]
            if a >= b:
                raise CorruptPermutation("pair is not ascending")
            sl.add(a)
            sl.add(b)
            i, j = sl.bisect_left(a), sl.bisect_left(b)
            m = len(sl)
            digits.append(j * (j - 1) // 2 + i)
            radices.append(m * (m - 1) // 2)
    digits.reverse()
    radices.reverse()
    return digits, radices


def _item_radices(items):
    out = []
    m = 0
    for it in reversed(items):
        m += len(it)
        out.append(m if len(it) == 1 else m * (m - 1) // 2)
    out.reverse()
    return out


def _arrange(items, digits, elements):
    sl = SortedList(elements)
    out = []
    for it, d in zip(items, digits):
        if len(it) == 1:
            out.append(sl.pop(d))
        else:
            i, j = _colex_unrank(d)
            b = sl.pop(j)
            a = sl.pop(i)
            out += [a, b]
    return out


# -- encoder -------------------------------------------------------------------------------

def _peel(mesh: DynMesh, interior, outer):
    """Removal rounds; each entry is (vertices, codes) in removal order."""
    V = mesh.V
    # interior vertices have as many neighbors as star triangles
    deg = [0] * len(mesh.P)
    for tv in V:
        for x in tv:
            deg[x] += 1
    alive = sorted(interior)
    rounds = []
    P = mesh.P
    while alive:
        buckets = [[], [], [], []]
        for v in alive:
            d = deg[v]
            if d <= 6:
                buckets[d - 3].append(v)
        blocked = set()
        chosen = []
        holes = {}
        # holes of independent vertices are disjoint, so each can go at once
        for bucket in buckets:
            for v in bucket:
                if v in blocked:
                    continue
                chosen.append(v)
                diag = []
                holes[v] = mesh.remove(v, diag)
                ring = mesh.last_star[0]
                blocked.update(ring)
                for x in ring:
                    deg[x] -= 1
                for a, b in diag:
                    deg[a] += 1
                    deg[b] += 1
                deg[v] = 0
        if not chosen:
            raise InternalCapacity("no removable vertex of degree <= 6")
        codes = {}
        for v in chosen:
            hole = holes[v]
            qx, qy = P[v]
            cands = []
            for t in hole:
                a, b, c = V[t]
                ax, ay = P[a]
                bx, by = P[b]
                cx, cy = P[c]
                if ((bx - ax) * (qy - ay) - (by - ay) * (qx - ax) >= 0
                        and (cx - bx) * (qy - by) - (cy - by) * (qx - bx) >= 0
                        and (ax - cx) * (qy - cy) - (ay - cy) * (qx - cx) >= 0):
                    cands.append(t)
            root = cands[0] if len(cands) == 1 else min(cands, key=mesh.key)
            codes[v] = SHAPE_INDEX[mesh.shape_of(root, set(hole))]
        rounds.append((chosen, codes))
        gone = set(chosen)
        alive = [v for v in alive if v not in gone]
    return rounds


def _encode_core(points, tris, outer, n_out, flag_edges=None, layout: PairLayout | None = None):
    """Arrangement of vertex ids 0..n_out-1 (interior ones) encoding the mesh.

    ``points``/``tris`` describe the full triangulation with outer triangle
    ``outer``; vertices with id >= n_out are synthetic and never output.
    """
    lr = lex_ranks(points)
    P = [tuple(p) for p in points]
    tris = np.asarray(tris, dtype=np.int64)
    adj, _ = compute_adjacency(tris, len(P))
    mesh = DynMesh.from_triangles(P, lr, tris.tolist(), adj.tolist())
    outer_set = set(outer)
    interior = [v for v in range(len(P)) if v not in outer_set]
    rounds = _peel(mesh, interior, outer)
    layout_rounds = rounds[::-1]
    pairs = layout is not None
    is_new_v = layout.is_new if pairs else None

    # positions: each block lists new vertices first, then duplicates
    sizes = [len(r[0]) for r in layout_rounds]
    block_sets = []
    is_new_pos = []
    for chosen, _ in layout_rounds:
        if pairs:
            nw = [v for v in chosen if is_new_v[v]]
            dp = [v for v in chosen if not is_new_v[v]]
        else:
            nw, dp = list(chosen), []
        block_sets.append((nw, dp))
        is_new_pos += [True] * len(nw) + [False] * len(dp)
    parity = layout.parity if pairs else 0
    blocks, straddles = _plan(sizes, is_new_pos, pairs, parity)

    # specials: lead takes the block's largest new point, trail the smallest
    element = {}
    free_new = []
    for blk, (nw, dp) in zip(blocks, block_sets):
        pool = sorted(nw, key=lambda v: lr[v])
        if blk.lead >= 0:
            element[blk.lead] = pool.pop()
        if blk.trail >= 0:
            element[blk.trail] = pool.pop(0)
        free_new.append(pool)
    if pairs and parity and True in is_new_pos:
        y = element[is_new_pos.index(True)]
        if layout.prev_point is not None and P[y] <= tuple(layout.prev_point):
            raise PairLayoutError("no vertex can follow the previous segment's last vertex")
    straddle_bits = []
    for a, b, ba, bb in straddles:
        straddle_bits.append(1 if lr[element[a]] > lr[element[b]] else 0)

    # payload: codes (coarsest block first, lexicographic within), straddle bits, flags
    symbols, radices = [], []
    for chosen, codes in layout_rounds:
        for v in sorted(chosen, key=lambda u: lr[u]):
            symbols.append(codes[v])
            radices.append(CODE_RADIX)
    symbols += straddle_bits
    radices += [2] * len(straddle_bits)
    low = mixed_to_int(symbols, radices)
    if flag_edges is not None:
        high = 0
        for i, bit in enumerate(_flag_bits(mesh_edges_after(points, tris, n_out), lr, flag_edges)):
            if bit:
                high |= 1 << i
        payload = gmpy2.mpz(high) * _products(radices, 0, len(radices), {}) + low if radices else high
    else:
        payload = low

    # header bits and digit capacity
    hdr = []
    _gamma(len(sizes), hdr)
    for s in sizes:
        _gamma(s, hdr)
    item_r = [_item_radices(blk.items) for blk in blocks]
    last_r = item_r[-1] if blocks else []
    hdr_digits = {}
    k = 0
    for idx_from_end in range(len(last_r)):
        if k >= len(hdr):
            break
        m = last_r[len(last_r) - 1 - idx_from_end]
        w = m.bit_length() - 1
        chunk = 0
        for j in range(w):
            if k + j < len(hdr) and hdr[k + j]:
                chunk |= 1 << j
        hdr_digits[len(last_r) - 1 - idx_from_end] = chunk
        k += w
    if k < len(hdr):
        raise CapacityExceeded("finest block too small for the header")
    main_r = []
    for b, blk in enumerate(blocks):
        for i, r in enumerate(item_r[b]):
            if not (b == len(blocks) - 1 and i in hdr_digits):
                main_r.append(r)
        main_r += _item_radices(blk.dup_items)
    try:
        main_d, _ = int_to_mixed(int(payload), main_r)
    except CapacityExceeded:
        raise CapacityExceeded(
            f"payload of {int(payload).bit_length()} bits exceeds the arrangement capacity") from None

    # digits -> arrangement
    order = [None] * sum(sizes)
    inv = {lr[v]: v for v in range(len(P))}
    cur = 0
    for b, (blk, (nw, dp)) in enumerate(zip(blocks, block_sets)):
        nd = []
        for i in range(len(blk.items)):
            if b == len(blocks) - 1 and i in hdr_digits:
                nd.append(hdr_digits[i])
            else:
                nd.append(main_d[cur])
                cur += 1
        dd = main_d[cur:cur + len(blk.dup_items)]
        cur += len(blk.dup_items)
        seq = _arrange(blk.items, nd, [lr[v] for v in free_new[b]])
        for p, x in zip((p for it in blk.items for p in it), seq):
            order[p] = inv[x]
        seq = _arrange(blk.dup_items, dd, [lr[v] for v in dp])
        for (p,), x in zip(blk.dup_items, seq):
            order[p] = inv[x]
        for p, v in element.items():
            if blk.start <= p < blk.end:
                order[p] = v
    # straddling pairs are stored ascending; the payload bit recovers membership
    for (a, b, _, _), bit in zip(straddles, straddle_bits):
        if bit:
            order[a], order[b] = order[b], order[a]
    assert None not in order
    return order


def mesh_edges_after(points, tris, n_real):
    """Edges of a triangle table with both endpoints below n_real."""
    tris = np.asarray(tris, dtype=np.int64)
    e = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    e = np.sort(e, axis=1)
    e = e[(e < n_real).all(axis=1)]
    return np.unique(e, axis=0)


def _flag_bits(edges, lr, keep):
    """Flags in canonical (lexicographic by point) edge order."""
    keyed = []
    for a, b in edges.tolist():
        la, lb = lr[a], lr[b]
        keyed.append(((la, lb) if la < lb else (lb, la), (a, b)))
    keyed.sort()
    return [1 if e in keep else 0 for _, e in keyed]


# -- decoder -----------------------------------------------------------------------------

def _decode_core(P, outer_ids, n_pos, with_flags: bool, layout: PairLayout | None = None):
    """Rebuild the triangulation from points in stored order.

    P lists all points (positions 0..n_pos-1 are the arranged vertices, the
    rest are outer or synthetic). Returns (triangles, flag_edges or None,
    block sizes).
    """
    lr = lex_ranks(P)
    pairs = layout is not None
    is_new = layout.is_new if pairs else [True] * n_pos
    parity = layout.parity if pairs else 0
    if len(is_new) != n_pos:
        raise CorruptPermutation("layout flags do not match the point count")
    newpos = [p for p in range(n_pos) if is_new[p]]
    c = len(newpos)
    if n_pos == 0:
        sizes = []
    else:
        sizes = _read_header(newpos, lr, pairs, parity, c)
        if sum(sizes) != n_pos:
            raise CorruptPermutation("header sizes do not sum to the point count")
    blocks, straddles = _plan(sizes, is_new, pairs, parity)
    hdr_items = _header_count(blocks, lr, sizes)
    main_d, main_r = [], []
    for b, blk in enumerate(blocks):
        d, r = _suffix_digits(blk.items, lr)
        if b == len(blocks) - 1:
            d, r = d[:len(d) - hdr_items], r[:len(r) - hdr_items]
        main_d += d
        main_r += r
        d, r = _suffix_digits(blk.dup_items, lr)
        main_d += d
        main_r += r
    payload = mixed_to_int(main_d, main_r)
    ncodes = n_pos
    sym_r = [CODE_RADIX] * ncodes + [2] * len(straddles)
    syms, rest = int_to_mixed(payload, sym_r, allow_rest=True)
    if rest and not with_flags:
        raise CorruptPermutation("payload has unused high-order content")
    codes = syms[:ncodes]
    member = {}
    for blk_i, blk in enumerate(blocks):
        for p in range(blk.start, blk.end):
            member[p] = blk_i
    for (a, b, ba, bb), bit in zip(straddles, syms[ncodes:]):
        if bit:
            member[a], member[b] = bb, ba
    block_members = [[] for _ in blocks]
    for p in range(n_pos):
        block_members[member[p]].append(p)

    # geometry: start from the outer triangle and re-insert block by block
    mesh = DynMesh(P, lr)
    a, b, c3 = outer_ids
    if orient(P[a], P[b], P[c3]) <= 0:
        raise CorruptPermutation("outer triangle is not counterclockwise")
    t = mesh.add(a, b, c3, -1, -1, -1)
    mesh.vt[a] = mesh.vt[b] = mesh.vt[c3] = t
    hk = hilbert_keys(np.asarray(P[:n_pos], dtype=np.int64)).tolist() if n_pos else []
    ci = 0
    last = t
    for members in block_members:
        roots = {}
        for v in sorted(members, key=hk.__getitem__):
            if mesh.V[last] is None:
                last = len(mesh.V) - 1
            t, zero = mesh.locate(P[v], last)
            last = t
            if zero >= 0:
                u = mesh.N[t][zero]
                if u >= 0 and mesh.key(u) < mesh.key(t):
                    t = u
            roots[v] = t
        claimed = set()
        holes = []
        for v in sorted(members, key=lr.__getitem__):
            holes.append((v, mesh.apply_shape(roots[v], codes[ci], claimed)))
            ci += 1
        for v, hole in holes:
            mesh.insert(v, hole)
    tris = [tv for tv in mesh.V if tv is not None]
    if with_flags:
        edges = mesh_edges_after(P, np.array(tris, dtype=np.int64), n_pos)
        return tris, (edges, rest), sizes
    return tris, None, sizes


def _read_header(newpos, lr, pairs, parity, c):
    """Parse round count and sizes from the digits at the end of the new positions."""
    items = _tail_items(newpos, pairs, parity, c)
    sl = SortedList()
    bits = []
    state = {"i": 0}

    def pull():
        if state["i"] >= len(items):
            raise CorruptPermutation("header runs past the arranged points")
        it = items[state["i"]]
        state["i"] += 1
        if len(it) == 1:
            x = lr[it[0]]
            sl.add(x)
            d, m = sl.bisect_left(x), len(sl)
        else:
            a, b = lr[it[0]], lr[it[1]]
            if a >= b:
                raise CorruptPermutation("pair is not ascending")
            sl.add(a)
            sl.add(b)
            i, j = sl.bisect_left(a), sl.bisect_left(b)
            m = len(sl)
            d, m = j * (j - 1) // 2 + i, m * (m - 1) // 2
        w = m.bit_length() - 1
        if d >> w:
            raise CorruptPermutation("header digit out of range")
        bits.extend((d >> j) & 1 for j in range(w))

    pos = 0

    def bit():
        nonlocal pos
        while pos >= len(bits):
            pull()
        pos += 1
        return bits[pos - 1]

    def gamma():
        zeros = 0
        while bit() == 0:
            zeros += 1
            if zeros > 64:
                raise CorruptPermutation("malformed header")
        x = 1
        for _ in range(zeros):
            x = (x << 1) | bit()
        return x

    r = gamma()
    if r > len(lr):
        raise CorruptPermutation("malformed header")
    return [gamma() for _ in range(r)]


def _tail_items(newpos, pairs, parity, c):
    """Items of the new-position sequence, from the end, skipping an unpaired last one."""
    if not pairs:
        return [(p,) for p in reversed(newpos)]
    out = []
    i = c - 1
    if (c + parity) % 2:
        i -= 1
    while i - 1 >= parity:
        out.append((newpos[i - 1], newpos[i]))
        i -= 2
    return out


def _header_count(blocks, lr, sizes) -> int:
    """Number of finest-block items used by the header (recomputed from sizes)."""
    if not blocks:
        return 0
    hdr = []
    _gamma(len(sizes), hdr)
    for s in sizes:
        _gamma(s, hdr)
    radices = _item_radices(blocks[-1].items)
    k = 0
    used = 0
    for m in reversed(radices):
        if k >= len(hdr):
            break
        k += m.bit_length() - 1
        used += 1
    if k < len(hdr):
        raise CorruptPermutation("header does not fit the finest block")
    return used


# -- public API -----------------------------------------------------------------------------

def _outer_last_order(T: Triangulation):
    o = list(T.outer)
    lr = lex_ranks(T.points)
    k = min(range(3), key=lambda i: lr[o[i]])
    return o[k:] + o[:k]


def encode_triangulation(T: Triangulation, cfg: CodecConfig | None = None) -> list:
    """Vertex ids (0-based) in an order that encodes T; outer vertices come last."""
    cfg = cfg or CodecConfig()
    if T.n < cfg.min_n:
        raise TooSmall(f"n={T.n} is below the codec minimum {cfg.min_n}")
    outer = _outer_last_order(T)
    order = _encode_core(T.points, T.triangles, outer, T.n)
    return order + outer


def decode_triangulation(points, cfg: CodecConfig | None = None) -> Triangulation:
    pts = [tuple(int(c) for c in p) for p in points]
    n = len(pts)
    if n < 4:
        raise CorruptPermutation("too few points")
    outer = (n - 3, n - 2, n - 1)
    tris, _, _ = _decode_core(pts, outer, n - 3, False)
    return Triangulation(pts, np.array(tris, dtype=np.int64), outer)


def encode_faces(points, faces, layout: PairLayout | None = None) -> list:
    """Order of ``points`` encoding a set of triangles; a synthetic triangle closes the mesh."""
    n = len(points)
    tris = wrap_faces(points, faces)
    allp = [tuple(p) for p in points] + synthetic_triangle(points)
    return _encode_core(allp, tris, (n, n + 1, n + 2), n, None, layout)


def decode_faces(points, layout: PairLayout | None = None):
    """Triangles (position triples, synthetic vertices n..n+2) of the wrapped mesh."""
    pts = [tuple(int(c) for c in p) for p in points]
    n = len(pts)
    allp = pts + synthetic_triangle(pts)
    tris, _, _ = _decode_core(allp, (n, n + 1, n + 2), n, False, layout)
    return tris, allp


def encode_subdivision(G: Subdivision, cfg: CodecConfig | None = None) -> list:
    cfg = cfg or CodecConfig("subdivision")
    n = len(G.points)
    if n < cfg.min_n:
        raise TooSmall(f"n={n} is below the subdivision codec minimum {cfg.min_n}")
    allp = [tuple(p) for p in G.points] + synthetic_triangle(G.points)
    segs = np.array(sorted(G.edges) + [(n, n + 1), (n + 1, n + 2), (n + 2, n)], dtype=np.int64)
    tris = constrained_triangulation(np.array(allp, dtype=np.int64), segs)
    keep = {(min(a, b), max(a, b)) for a, b in G.edges}
    return _encode_core(allp, tris, (n, n + 1, n + 2), n, keep)


def decode_subdivision(points, cfg: CodecConfig | None = None) -> Subdivision:
    pts = [tuple(int(c) for c in p) for p in points]
    n = len(pts)
    allp = pts + synthetic_triangle(pts)
    tris, (edges, rest), _ = _decode_core(allp, (n, n + 1, n + 2), n, True)
    lr = lex_ranks(allp)
    keyed = sorted((((lr[a], lr[b]) if lr[a] < lr[b] else (lr[b], lr[a])), (a, b)) for a, b in edges.tolist())
    if rest >> len(keyed):
        raise CorruptPermutation("flag payload longer than the edge count")
    kept = {e for i, (_, e) in enumerate(keyed) if (rest >> i) & 1}
    return Subdivision(pts, kept, subdivision_faces(pts, kept))
