"""Triangulations and subdivisions: validation, text format, generation.

A Triangulation keeps a triangle table (CCW vertex triples) and a neighbor
table where ``adjacency[t, k]`` is the triangle across the edge from vertex
slot k to slot k+1, or -1 across the outer face.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import triangle as _triangle

from .errors import (BadOrientation, CoordinateOverflow, DuplicatePoint, EulerViolation,
                     FormatError, GeometryError, NonTriangleFace, NotSimple, TooSmall)
from .geom import COORD_LIMIT, Point, area2, orient

_SAFE_INT64 = 1 << 29


def _orient_many(xy: np.ndarray, tris: np.ndarray) -> np.ndarray:
    """Signs of orient for each row of tris; exact."""
    a, b, c = xy[tris[:, 0]], xy[tris[:, 1]], xy[tris[:, 2]]
    if xy.size == 0 or np.abs(xy).max() <= _SAFE_INT64:
        d = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
        return np.sign(d)
    pts = [tuple(p) for p in xy.tolist()]
    return np.array([orient(pts[i], pts[j], pts[k]) for i, j, k in tris.tolist()], dtype=np.int64)


def compute_adjacency(tris: np.ndarray, n: int):
    """Neighbor table plus the directed boundary edges (those without a twin).

    Raises EulerViolation if a directed edge is used twice.
    """
    f = len(tris)
    src = tris.ravel()
    dst = np.roll(tris, -1, axis=1).ravel()
    key = src.astype(np.int64) * n + dst
    order = np.argsort(key, kind="stable")
    sk = key[order]
    dup = np.flatnonzero(sk[1:] == sk[:-1])
    if dup.size:
        e = int(sk[dup[0]])
        t = int(order[dup[0] + 1]) // 3
        raise EulerViolation(f"face {t + 1}: edge ({e // n + 1},{e % n + 1}) used twice with one orientation")
    twin = dst.astype(np.int64) * n + src
    pos = np.searchsorted(sk, twin)
    pos = np.minimum(pos, len(sk) - 1)
    found = sk[pos] == twin
    adj = np.full(3 * f, -1, dtype=np.int64)
    adj[found] = order[pos[found]] // 3
    boundary = np.flatnonzero(~found)
    return adj.reshape(f, 3), np.stack([src[boundary], dst[boundary]], axis=1)


@dataclass
class Triangulation:
    points: list
    triangles: np.ndarray
    outer: tuple
    adjacency: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if self.adjacency is None:
            self.adjacency, _ = compute_adjacency(self.triangles, max(self.n, 1))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def f(self) -> int:
        return len(self.triangles)

    @property
    def m(self) -> int:
        return (3 * self.f + 3) // 2

    def xy(self) -> np.ndarray:
        return np.array(self.points, dtype=np.int64).reshape(-1, 2)

    def face_set(self) -> set:
        """Faces as rotation-normalized coordinate triples (id independent)."""
        pts = self.points
        out = set()
        for a, b, c in self.triangles.tolist():
            tri = (pts[a], pts[b], pts[c])
            k = tri.index(min(tri))
            out.add(tri[k:] + tri[:k])
        return out

    def edge_set(self) -> set:
        pts = self.points
        out = set()
        for a, b, c in self.triangles.tolist():
            for u, v in ((a, b), (b, c), (c, a)):
                p, q = pts[u], pts[v]
                out.add((p, q) if p < q else (q, p))
        return out

    def vertex_faces(self):
        """CSR-style incidence: faces around each vertex (unordered)."""
        order = np.argsort(self.triangles.ravel(), kind="stable")
        counts = np.bincount(self.triangles.ravel(), minlength=self.n)
        start = np.concatenate([[0], np.cumsum(counts)])
        return start, order // 3


def validate(points, tris, outer=None) -> Triangulation:
    """Check every triangulation invariant; return the validated object."""
    n = len(points)
    if n < 4:
        raise TooSmall(f"a triangulation needs at least 4 vertices, got {n}")
    pts = []
    for i, p in enumerate(points):
        if len(p) != 2:
            raise FormatError(f"vertex {i + 1}: expected two coordinates")
        x, y = int(p[0]), int(p[1])
        if abs(x) > COORD_LIMIT or abs(y) > COORD_LIMIT:
            raise CoordinateOverflow(f"vertex {i + 1}: coordinate beyond 2^30")
        pts.append((x, y))
    xy = np.array(pts, dtype=np.int64)
    order = np.lexsort((xy[:, 1], xy[:, 0]))
    sxy = xy[order]
    same = np.flatnonzero(np.all(sxy[1:] == sxy[:-1], axis=1))
    if same.size:
        i, j = sorted((int(order[same[0]]), int(order[same[0] + 1])))
        raise DuplicatePoint(f"vertex {j + 1} duplicates vertex {i + 1}")
    tris = np.asarray(tris, dtype=np.int64).reshape(-1, 3)
    if tris.size and (tris.min() < 0 or tris.max() >= n):
        bad = int(np.flatnonzero((tris < 0).any(1) | (tris >= n).any(1))[0])
        raise NonTriangleFace(f"face {bad + 1}: vertex index out of range")
    rep = np.flatnonzero((tris[:, 0] == tris[:, 1]) | (tris[:, 1] == tris[:, 2]) | (tris[:, 0] == tris[:, 2]))
    if rep.size:
        raise NonTriangleFace(f"face {int(rep[0]) + 1}: repeated vertex")
    f = len(tris)
    if f != 2 * n - 5:
        raise EulerViolation(f"face count {f} != 2n-5 = {2 * n - 5}")
    if outer is None:
        outer = (0, 1, 2)
    o = list(outer)
    so = orient(pts[o[0]], pts[o[1]], pts[o[2]])
    if so == 0:
        raise BadOrientation("outer face vertices are collinear")
    if so < 0:
        o = [o[0], o[2], o[1]]
    signs = _orient_many(xy, tris)
    bad = np.flatnonzero(signs <= 0)
    if bad.size:
        raise BadOrientation(f"face {int(bad[0]) + 1} is not counter-clockwise")
    adj, boundary = compute_adjacency(tris, n)
    expected = {(o[0], o[1]), (o[1], o[2]), (o[2], o[0])}
    got = {(int(a), int(b)) for a, b in boundary.tolist()}
    if got != expected:
        extra = sorted(got - expected)
        what = f"edge ({extra[0][0] + 1},{extra[0][1] + 1}) has only one face" if extra else "outer edges missing"
        raise EulerViolation(f"boundary is not the outer triangle: {what}")
    used = np.zeros(n, dtype=bool)
    used[tris.ravel()] = True
    if not used.all():
        raise EulerViolation(f"vertex {int(np.flatnonzero(~used)[0]) + 1} lies on no face")
    a, b, c = (pts[i] for i in o)
    total = sum(area2(pts[i], pts[j], pts[k]) for i, j, k in tris.tolist()) if n < 5000 else None
    if total is None:
        ta, tb, tc = xy[tris[:, 0]], xy[tris[:, 1]], xy[tris[:, 2]]
        total = int(_exact_area_sum(ta, tb, tc))
    if total != area2(a, b, c):
        raise GeometryError("faces overlap: areas do not sum to the outer triangle")
    return Triangulation(pts, tris, tuple(o), adj)


def _exact_area_sum(a, b, c) -> int:
    """Sum of doubled signed areas, exact via Python ints for large inputs."""
    if np.abs(np.concatenate([a, b, c])).max() <= _SAFE_INT64:
        d = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
        hi = d >> 32
        lo = d & 0xFFFFFFFF
        return (int(hi.sum()) << 32) + int(lo.sum())
    return sum(area2(tuple(p), tuple(q), tuple(r)) for p, q, r in zip(a.tolist(), b.tolist(), c.tolist()))


# -- text format -----------------------------------------------------------

def load_tri(text: str) -> Triangulation:
    """Parse and validate the .tri format."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError("empty input")
    try:
        n, f = (int(t) for t in lines[0].split())
    except ValueError:
        raise FormatError("line 1: expected 'n f'") from None
    if len(lines) != 1 + n + f:
        raise FormatError(f"expected {1 + n + f} lines, found {len(lines)}")
    pts = []
    for i in range(n):
        parts = lines[1 + i].split()
        if len(parts) != 2:
            raise FormatError(f"line {2 + i}: expected 'x y'")
        try:
            pts.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise FormatError(f"line {2 + i}: non-integer coordinate") from None
    tris = []
    for j in range(f):
        parts = lines[1 + n + j].split()
        if len(parts) != 3:
            raise NonTriangleFace(f"face {j + 1}: expected three vertex indices, got {len(parts)}")
        try:
            tris.append([int(t) - 1 for t in parts])
        except ValueError:
            raise FormatError(f"line {2 + n + j}: non-integer index") from None
    return validate(pts, np.array(tris, dtype=np.int64).reshape(-1, 3), (0, 1, 2))


def dump_tri(T: Triangulation) -> str:
    """Serialize; vertices are reordered so the outer face comes first."""
    n = T.n
    o = list(T.outer)
    rest = [i for i in range(n) if i not in o]
    perm = o + rest
    inv = np.empty(n, dtype=np.int64)
    inv[perm] = np.arange(n)
    out = [f"{n} {T.f}"]
    out += [f"{T.points[i][0]} {T.points[i][1]}" for i in perm]
    tris = inv[T.triangles] + 1
    out += [f"{a} {b} {c}" for a, b, c in tris.tolist()]
    return "\n".join(out) + "\n"


def load_pts(text: str) -> list:
    pts = []
    for i, line in enumerate(text.split("\n")):
        if not line.strip():
            if i == len(text.split("\n")) - 1:
                continue
            raise FormatError(f"line {i + 1}: empty line")
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {i + 1}: expected 'x y'")
        pts.append((int(parts[0]), int(parts[1])))
    return pts


def dump_pts(points) -> str:
    return "".join(f"{x} {y}\n" for x, y in points)


# -- generation ------------------------------------------------------------

def _random_flips(xy: np.ndarray, tris: np.ndarray, rng, passes: int) -> np.ndarray:
    n = len(xy)
    for _ in range(passes):
        adj, _ = compute_adjacency(tris, n)
        f = len(tris)
        t_idx = np.repeat(np.arange(f), 3)
        k_idx = np.tile(np.arange(3), f)
        u_idx = adj.ravel()
        keep = u_idx > t_idx
        t_e, k_e, u_e = t_idx[keep], k_idx[keep], u_idx[keep]
        pri = rng.random(len(t_e))
        best = np.full(f, -1.0)
        np.maximum.at(best, t_e, pri)
        np.maximum.at(best, u_e, pri)
        sel = (best[t_e] == pri) & (best[u_e] == pri)
        t_e, k_e, u_e = t_e[sel], k_e[sel], u_e[sel]
        a = tris[t_e, k_e]
        b = tris[t_e, (k_e + 1) % 3]
        c = tris[t_e, (k_e + 2) % 3]
        urow = tris[u_e]
        ku = np.argmax(urow == b[:, None], axis=1)  # slot of b in u; edge (b, a)
        d = urow[np.arange(len(u_e)), (ku + 2) % 3]
        pa, pb, pc, pd = xy[a], xy[b], xy[c], xy[d]

        def sgn(p, q, r):
            return np.sign((q[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (q[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0]))

        ok = (sgn(pa, pd, pc) > 0) & (sgn(pd, pb, pc) > 0)
        tris = tris.copy()
        tris[t_e[ok]] = np.stack([c[ok], a[ok], d[ok]], axis=1)
        tris[u_e[ok]] = np.stack([d[ok], b[ok], c[ok]], axis=1)
    return tris


def outer_for(n: int) -> list:
    if n == 4:
        return [(0, 0), (10, 0), (5, 9)]
    side = 1 << max(12, min(29, (16 * n).bit_length() + 1))
    return [(0, 0), (side, 0), (side // 2, side)]


def sample_in_triangle(rng, outer, count: int, strict: bool = True) -> np.ndarray:
    """Uniform integer points strictly inside the triangle (rejection sampling)."""
    (ax, ay), (bx, by), (cx, cy) = outer
    lo = np.array([min(ax, bx, cx), min(ay, by, cy)])
    hi = np.array([max(ax, bx, cx), max(ay, by, cy)])
    out = []
    got = 0
    while got < count:
        m = max(64, int((count - got) * 2.2))
        cand = rng.integers(lo, hi + 1, size=(m, 2), dtype=np.int64)
        x, y = cand[:, 0], cand[:, 1]
        s0 = (bx - ax) * (y - ay) - (by - ay) * (x - ax)
        s1 = (cx - bx) * (y - by) - (cy - by) * (x - bx)
        s2 = (ax - cx) * (y - cy) - (ay - cy) * (x - cx)
        ok = (s0 > 0) & (s1 > 0) & (s2 > 0) if strict else (s0 >= 0) & (s1 >= 0) & (s2 >= 0)
        cand = cand[ok]
        out.append(cand)
        got += len(cand)
    return np.concatenate(out)[:count]


def gen_random(n: int, seed: int) -> Triangulation:
    """Random triangulation with a triangular outer face, deterministic per seed."""
    if n < 4:
        raise TooSmall(f"n must be at least 4, got {n}")
    rng = np.random.default_rng(seed)
    outer = outer_for(n)
    if n == 4:
        xy = np.array(outer + [(5, 3)], dtype=np.int64)
    else:
        need = n - 3
        pts = np.zeros((0, 2), dtype=np.int64)
        while len(pts) < need:
            more = sample_in_triangle(rng, outer, need - len(pts) + 16)
            pts = np.unique(np.concatenate([pts, more]), axis=0) if len(pts) else np.unique(more, axis=0)
        pts = pts[rng.permutation(len(pts))[:need]]
        xy = np.concatenate([np.array(outer, dtype=np.int64), pts])
    res = _triangle.triangulate({"vertices": xy.astype(np.float64)}, "Q")
    if len(res["vertices"]) != n:
        raise GeometryError("triangulator introduced extra vertices")
    tris = res["triangles"].astype(np.int64)
    sg = _orient_many(xy, tris)
    flip = sg < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    tris = _random_flips(xy, tris, rng, passes=4)
    pts_list = [tuple(p) for p in xy.tolist()]
    adj, _ = compute_adjacency(tris, n)
    return Triangulation(pts_list, tris, (0, 1, 2), adj)


# -- polygon and complement triangulation ----------------------------------

def _segments_cross(p, q, r, s) -> bool:
    """Proper or improper intersection of closed segments pq and rs."""
    d1, d2 = orient(p, q, r), orient(p, q, s)
    d3, d4 = orient(r, s, p), orient(r, s, q)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def on(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return ((d1 == 0 and on(p, q, r)) or (d2 == 0 and on(p, q, s))
            or (d3 == 0 and on(r, s, p)) or (d4 == 0 and on(r, s, q)))


def check_simple(cycle) -> None:
    k = len(cycle)
    if len(set(cycle)) != k:
        raise NotSimple("polygon repeats a vertex")
    for i in range(k):
        p, q = cycle[i], cycle[(i + 1) % k]
        for j in range(i + 1, k):
            if j == i or (j + 1) % k == i or j == (i + 1) % k:
                continue
            if _segments_cross(p, q, cycle[j], cycle[(j + 1) % k]):
                raise NotSimple(f"edges {i} and {j} intersect")
    if k >= 3 and _signed_area2(cycle) == 0:
        raise NotSimple("polygon has zero area")


def _signed_area2(cycle) -> int:
    s = 0
    k = len(cycle)
    for i in range(k):
        x0, y0 = cycle[i]
        x1, y1 = cycle[(i + 1) % k]
        s += x0 * y1 - x1 * y0
    return s


def ear_clip(cycle) -> list:
    """Triangulate a simple CCW polygon; returns CCW index triples."""
    idx = list(range(len(cycle)))
    out = []
    guard = 0
    while len(idx) > 3:
        m = len(idx)
        for t in range(m):
            i0, i1, i2 = idx[t - 1], idx[t], idx[(t + 1) % m]
            a, b, c = cycle[i0], cycle[i1], cycle[i2]
            if orient(a, b, c) <= 0:
                continue
            ok = True
            for j in idx:
                if j == i0 or j == i1 or j == i2:
                    continue
                p = cycle[j]
                if orient(a, b, p) >= 0 and orient(b, c, p) >= 0 and orient(c, a, p) >= 0:
                    ok = False
                    break
            if ok:
                out.append((i0, i1, i2))
                del idx[t]
                break
        else:
            raise NotSimple("no ear found; polygon is not simple")
        guard += 1
    out.append(tuple(idx))
    return out


def triangulate_polygon(cycle) -> list:
    """Diagonals (index pairs into ``cycle``) of a triangulation of a simple polygon."""
    cycle = [tuple(p) for p in cycle]
    if len(cycle) < 3:
        raise NotSimple("a polygon needs at least 3 vertices")
    check_simple(cycle)
    k = len(cycle)
    if _signed_area2(cycle) < 0:
        rev = cycle[::-1]
        tris = [tuple(k - 1 - i for i in t) for t in ear_clip(rev)]
    else:
        tris = ear_clip(cycle)
    diags = set()
    for t in tris:
        for u, v in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            if (u - v) % k not in (1, k - 1):
                diags.add((min(u, v), max(u, v)))
    return sorted(diags)


def constrained_triangulation(xy: np.ndarray, segments: np.ndarray) -> np.ndarray:
    """Constrained triangulation of the convex hull; CCW triangles, no new vertices."""
    xy = np.asarray(xy, dtype=np.int64)
    if np.abs(xy).max() >= (1 << 52):
        raise GeometryError("coordinates too large for the constrained triangulator")
    data = {"vertices": xy.astype(np.float64)}
    segs = np.asarray(segments, dtype=np.int64).reshape(-1, 2)
    if len(segs):
        data["segments"] = segs.astype(np.int32)
    res = _triangle.triangulate(data, "pQ")
    if len(res["vertices"]) != len(xy):
        raise GeometryError("constraint segments cross; triangulator added vertices")
    tris = res["triangles"].astype(np.int64)
    sg = _orient_many(xy, tris)
    if (sg == 0).any():
        raise GeometryError("triangulator produced a degenerate triangle")
    flip = sg < 0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    return tris


def triangulate_complement(cycles, outer, faces=None) -> Triangulation:
    """Triangulate the area between inner cycles and an outer triangle.

    ``cycles`` are lists of points; ``faces`` optionally lists triangles
    (as point triples) inside the cycles that must be kept. The interiors of
    cycles without given faces are triangulated as well.
    """
    outer = [tuple(p) for p in outer]
    if orient(*outer) < 0:
        outer = [outer[0], outer[2], outer[1]]
    index = {p: i for i, p in enumerate(outer)}
    segs = [(0, 1), (1, 2), (2, 0)]

    def vid(p):
        p = tuple(p)
        if p not in index:
            index[p] = len(index)
        return index[p]

    a, b, c = outer
    for cyc in cycles:
        cyc = [tuple(p) for p in cyc]
        for p in cyc:
            if p in outer[:3] or not (orient(a, b, p) > 0 and orient(b, c, p) > 0 and orient(c, a, p) > 0):
                raise GeometryError(f"cycle vertex {p} is not strictly inside the outer triangle")
        ids = [vid(p) for p in cyc]
        segs += [(ids[i], ids[(i + 1) % len(ids)]) for i in range(len(ids))]
    for tri in faces or []:
        ids = [vid(p) for p in tri]
        segs += [(ids[0], ids[1]), (ids[1], ids[2]), (ids[2], ids[0])]
    pts = list(index)
    xy = np.array(pts, dtype=np.int64)
    tris = constrained_triangulation(xy, np.array(segs))
    if faces:
        have = Triangulation(pts, tris, (0, 1, 2)).face_set()
        for tri in faces:
            t = tuple(tuple(p) for p in tri)
            if orient(*t) < 0:
                t = (t[0], t[2], t[1])
            k = t.index(min(t))
            if t[k:] + t[:k] not in have:
                raise GeometryError(f"given face {tri} is not preserved")
    return validate(pts, tris, (0, 1, 2))


def dual_graph(T: Triangulation) -> sp.csr_matrix:
    """Face adjacency over internal faces as a symmetric 0/1 CSR matrix."""
    f = T.f
    t = np.repeat(np.arange(f), 3)
    u = T.adjacency.ravel()
    keep = u >= 0
    data = np.ones(int(keep.sum()), dtype=np.int8)
    return sp.csr_matrix((data, (t[keep], u[keep])), shape=(f, f))


# -- subdivisions ------------------------------------------------------------

@dataclass
class Subdivision:
    points: list
    edges: set
    faces: list = field(default_factory=list)
    bounding: tuple = ()

    @property
    def n(self) -> int:
        return len(self.points)

    def edge_points(self) -> set:
        pts = self.points
        return {(min(pts[u], pts[v]), max(pts[u], pts[v])) for u, v in self.edges}


def subdivision_faces(points, edges) -> list:
    """Bounded faces of a connected plane graph as CCW vertex cycles."""
    nbrs = {}
    for u, v in edges:
        nbrs.setdefault(u, []).append(v)
        nbrs.setdefault(v, []).append(u)
    import math

    for u, lst in nbrs.items():
        px, py = points[u]
        lst.sort(key=lambda w: math.atan2(points[w][1] - py, points[w][0] - px))
    pos = {(u, w): i for u, lst in nbrs.items() for i, w in enumerate(lst)}
    seen = set()
    faces = []
    for u, v in sorted(pos):
        if (u, v) in seen:
            continue
        cyc = []
        a, b = u, v
        while (a, b) not in seen:
            seen.add((a, b))
            cyc.append(a)
            lst = nbrs[b]
            i = pos[(b, a)]
            a, b = b, lst[(i - 1) % len(lst)]
        if _signed_area2([points[i] for i in cyc]) > 0:
            faces.append(cyc)
    return faces


def random_subdivision(T: Triangulation, frac: float, seed: int) -> Subdivision:
    """Delete about ``frac`` of the interior edges while keeping faces simple."""
    rng = np.random.default_rng(seed)
    f = T.f
    parent = list(range(f))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    face_verts = {t: set(T.triangles[t].tolist()) for t in range(f)}
    face_edges = {}
    edges = []
    for t in range(f):
        for k in range(3):
            u = int(T.adjacency[t, k])
            if u > t:
                a, b = int(T.triangles[t, k]), int(T.triangles[t, (k + 1) % 3])
                edges.append((min(a, b), max(a, b), t, u))
    for e in edges:
        for side in e[2:]:
            face_edges.setdefault(side, set()).add((e[0], e[1]))
    target = int(frac * len(edges))
    removed = set()
    for i in rng.permutation(len(edges)).tolist():
        if len(removed) >= target:
            break
        a, b, t, u = edges[i]
        ra, rb = find(t), find(u)
        if ra == rb:
            continue
        if face_verts[ra] & face_verts[rb] != {a, b}:
            continue
        shared = face_edges[ra] & face_edges[rb]
        if shared != {(a, b)}:
            continue
        parent[rb] = ra
        face_verts[ra] |= face_verts.pop(rb)
        face_edges[ra] = (face_edges[ra] | face_edges.pop(rb)) - {(a, b)}
        removed.add((a, b))
    all_edges = set()
    for t in range(f):
        tri = T.triangles[t].tolist()
        for k in range(3):
            a, b = tri[k], tri[(k + 1) % 3]
            all_edges.add((min(a, b), max(a, b)))
    kept = all_edges - removed
    faces = subdivision_faces(T.points, kept)
    return Subdivision(list(T.points), kept, faces, tuple(T.outer))
