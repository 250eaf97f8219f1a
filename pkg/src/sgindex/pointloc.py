"""Independent-set hierarchy for point location in a labeled triangulation.

Build repeatedly deletes an independent set of interior vertices of degree
at most 8 and ear-clips their holes until only the outer triangle is left.
Each deleted vertex becomes a hole record: its label, its ring of neighbor
labels and the ids of its star triangles (the finer triangles covering the
hole). Triangles created in one hole get consecutive ids, so the hole of a
triangle is a rank on a marker bit vector.

A query starts at the last triangle and, at each hole, picks the star
sectors whose cone around the deleted vertex holds the point. Ties are
followed on every branch and the smallest original face id wins. The
structure never stores coordinates; it reads them through a label accessor.
"""
from dataclasses import dataclass

import numpy as np

from .bitio import BitWriter, BytesSource, width_for
from .bitvec import BitVec, PackedArray, write_bitvec, write_packed
from .errors import OutsideHull, TagArityMismatch
from .geom import orient
from .mesh import Triangulation
from .permcode import DynMesh, lex_ranks

MAX_DEGREE = 8


def write_pl(w: BitWriter, T: Triangulation, tags, labels=None) -> None:
    """Append a point-location record for T; ``labels`` maps vertex ids to stored labels."""
    f = T.f
    tags = list(tags)
    if len(tags) != f:
        raise TagArityMismatch(f"{len(tags)} tags for {f} faces")
    labels = list(range(T.n)) if labels is None else [int(x) for x in labels]
    P = [tuple(p) for p in T.points]
    mesh = DynMesh.from_triangles(P, lex_ranks(P), T.triangles.tolist(), T.adjacency.tolist())
    outer = list(T.outer)
    nbr = [set() for _ in P]
    for a, b, c in T.triangles.tolist():
        nbr[a].update((b, c))
        nbr[b].update((a, c))
        nbr[c].update((a, b))
    outer_set = set(outer)
    alive = [v for v in range(len(P)) if v not in outer_set]
    hole_v, ring_lab, star_ids, marker, unary = [], [], [], [], []
    while alive:
        blocked = set()
        chosen = []
        for cap in range(3, MAX_DEGREE + 1):
            for v in alive:
                if len(nbr[v]) == cap and v not in blocked:
                    chosen.append(v)
                    blocked.add(v)
                    blocked.update(nbr[v])
        for v in chosen:
            diag = []
            new = mesh.remove(v, diag)
            ring, star = mesh.last_star
            hole_v.append(labels[v])
            ring_lab += [labels[x] for x in ring]
            star_ids += star
            unary += [1] + [0] * len(ring)
            marker += [1] + [0] * (len(new) - 1)
            for x in ring:
                nbr[x].discard(v)
            for a, b in diag:
                nbr[a].add(b)
                nbr[b].add(a)
            nbr[v] = set()
        gone = set(chosen)
        alive = [v for v in alive if v not in gone]
    unary.append(1)
    total = len(mesh.V)
    root = total - 1
    o = mesh.V[root]
    wl = width_for(max(labels) if labels else 1)
    wid = width_for(total)
    w.write(f, 64)
    w.write(total, 64)
    w.write(len(hole_v), 64)
    w.write(wl, 8)
    for x in o:
        w.write(labels[x], wl)
    write_packed(w, tags)
    write_packed(w, hole_v, wl)
    write_packed(w, ring_lab, wl)
    write_packed(w, star_ids, wid)
    write_bitvec(w, unary, "plain")
    write_bitvec(w, marker if marker else [0], "plain")


@dataclass
class PLHit:
    face: int
    tag: int
    labels: tuple


class PLStructure:
    """Read-only view of a point-location record; ``coord(label)`` yields points."""

    def __init__(self, src, off: int, coord):
        self.src = src
        self.off = off
        self.coord = coord
        rd = src.read
        self.f = rd(off, 64)
        self.total = rd(off + 64, 64)
        self.holes = rd(off + 128, 64)
        wl = rd(off + 192, 8)
        p = off + 200
        self.outer = tuple(rd(p + i * wl, wl) for i in range(3))
        p += 3 * wl
        self.tags = PackedArray(src, p)
        self.hole_v = PackedArray(src, self.tags.end)
        self.ring = PackedArray(src, self.hole_v.end)
        self.stars = PackedArray(src, self.ring.end)
        self.unary = BitVec(src, self.stars.end)
        self.marker = BitVec(src, self.unary.end)
        self.end = self.marker.end

    @classmethod
    def build(cls, T: Triangulation, tags, coord=None, labels=None) -> "PLStructure":
        w = BitWriter()
        write_pl(w, T, tags, labels)
        if coord is None:
            pts = [tuple(p) for p in T.points]
            coord = pts.__getitem__
        return cls(BytesSource(w.to_bytes(), w.tell()), 0, coord)

    def size_bits(self) -> int:
        return self.end - self.off

    def _hole(self, t):
        h = self.marker.rank1(t - self.f + 1) - 1
        start = self.unary.select1(h + 1) - h - 1
        d = self.unary.select1(h + 2) - self.unary.select1(h + 1) - 1
        return h, start, d

    def locate(self, q, scale: int = 1) -> PLHit:
        """Face holding q/scale (closed), smallest face id on ties."""
        coord = self.coord
        if scale != 1:
            base = coord

            def coord(x):
                px, py = base(x)
                return px * scale, py * scale
        a, b, c = (coord(x) for x in self.outer)
        if orient(a, b, q) < 0 or orient(b, c, q) < 0 or orient(c, a, q) < 0:
            raise OutsideHull("outside hull")
        root = self.total - 1
        if root < self.f:
            return PLHit(root, self.tags[root], self.outer)
        best = None
        stack = [root]
        seen = {root}
        while stack:
            t = stack.pop()
            h, start, d = self._hole(t)
            vl = self.hole_v[h]
            pv = coord(vl)
            ring = [self.ring[start + i] for i in range(d)]
            s = [None] * d

            def side(i):
                if s[i] is None:
                    s[i] = orient(pv, coord(ring[i]), q)
                return s[i]

            hits = []
            for i in range(d):
                j = (i + 1) % d
                si = side(i)
                if si < 0:
                    continue
                sj = side(j)
                if sj > 0:
                    continue
                hits.append(i)
                if si > 0 and sj < 0:
                    break
            if len(hits) > 1 or (hits and (s[hits[0]] == 0 or s[(hits[0] + 1) % d] == 0)):
                hits = [i for i in range(d) if side(i) >= 0 and side((i + 1) % d) <= 0]
            for i in hits:
                child = self.stars[start + i]
                if child < self.f:
                    cand = (child, (vl, ring[i], ring[(i + 1) % d]))
                    if best is None or cand[0] < best[0]:
                        best = cand
                elif child not in seen:
                    seen.add(child)
                    stack.append(child)
        face, labs = best
        return PLHit(face, self.tags[face], labs)


def build_pl(T: Triangulation, tags, coord=None, labels=None) -> PLStructure:
    return PLStructure.build(T, tags, coord, labels)


def pl_locate(P: PLStructure, q) -> PLHit:
    return P.locate(tuple(q))
