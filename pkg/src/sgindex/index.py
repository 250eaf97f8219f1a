"""Two-level succinct point-location index over a permuted point array.

Build: a top face separator splits T into regions (components grouped up to
t*f faces); each region larger than the subregion target is split again into
units. Every unit's connectivity is stored in the order of its points (the
permutation codec); the index itself keeps only

* a point-location hierarchy over S' (separator faces plus the outer
  triangle, every other face tagged with its region),
* per split region, a hierarchy over S_i' (bottom separator faces plus the
  region boundary) tagged with unit ids,
* label tables mapping (region, unit, position) to region labels and
  (region, region label) to graph labels.

The permuted points are sorted by graph label, so a graph label is a point
address. The container is a byte string with a small section table; every
structure inside is read through ``src.read(bit_offset, width)``.
"""
import json
import math
import struct
from collections import OrderedDict
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.sparse import csgraph

from .bitio import BitWriter, BytesSource, width_for
from .bitvec import BitVec, PackedArray, write_bitvec, write_packed
from .errors import (CapacityExceeded, ContainerError, IdOutOfRange,
                     InternalCapacity, PairLayoutError, ParamError)
from .geom import add_orient_calls
from .mesh import Triangulation, constrained_triangulation, dual_graph
from .permcode import CodecConfig, PairLayout, decode_faces, encode_faces, hilbert_keys
from .pointloc import PLStructure, write_pl
from .separator import face_separator, vertex_separator

MAGIC = b"SGI1"
VERSION = 1
SECTIONS = ("TOPPL", "REGPL", "LBLB", "LBLC", "LBLD", "LBLX", "DIRS", "EXPL", "META")
SECTION_TAG = {name: i + 1 for i, name in enumerate(SECTIONS)}
_HEADER = struct.Struct("<4sHHddIIQ")
_ENTRY = struct.Struct("<IQQ")
FLAG_PAIRS = 1
FLAG_SUCCINCT = 2


def lg(x: float) -> int:
    return max(1, math.ceil(math.log2(max(x, 2))))


@dataclass
class BuildParams:
    a: float = 3.0
    b: float = 1.0
    s0: int = 2048
    codec: CodecConfig = field(default_factory=CodecConfig)
    backend: str = "permutation"
    pair_stable: bool = False

    def __post_init__(self):
        if not self.a > 2:
            raise ParamError(f"a must exceed 2, got {self.a}")
        if self.b <= 0:
            raise ParamError(f"b must be positive, got {self.b}")
        if self.s0 < 1:
            raise ParamError("s0 must be positive")
        if self.backend not in ("permutation", "explicit"):
            raise ParamError(f"unknown backend {self.backend!r}")


# -- build helpers -----------------------------------------------------------------

def _group(comps, bound: float, keys) -> list:
    """Group components (face-id arrays) so every group stays within ``bound`` faces."""
    half = bound / 2
    sizes = [len(c) for c in comps]
    groups = [[c] for c in range(len(comps)) if sizes[c] >= half]
    small = sorted((c for c in range(len(comps)) if sizes[c] < half), key=lambda c: keys[c])
    cur, size = [], 0
    for c in small:
        cur.append(c)
        size += sizes[c]
        if size >= half:
            groups.append(cur)
            cur, size = [], 0
    if cur:
        if groups:
            g = min(groups, key=lambda g: sum(sizes[c] for c in g))
            if sum(sizes[c] for c in g) + size <= bound:
                g.extend(cur)
                cur = []
        if cur:
            groups.append(cur)
    return [np.sort(np.concatenate([comps[c] for c in g])) for g in groups]


def _split(g_sub, faces, sep_local):
    alive = np.ones(len(faces), dtype=bool)
    alive[sep_local] = False
    idx = np.flatnonzero(alive)
    k, lab = csgraph.connected_components(g_sub[idx][:, idx], directed=False)
    order = np.argsort(lab, kind="stable")
    cuts = np.cumsum(np.bincount(lab, minlength=k))[:-1]
    return [faces[idx[part]] for part in np.split(order, cuts)]


def _free_order(vs, graph, P, pairs: bool, assigned: list) -> list:
    """Label order for vertices without codec structure (tails, leftovers, explicit units)."""
    if not pairs:
        return sorted(vs)
    new = sorted((v for v in vs if graph[v] < 0), key=P.__getitem__)
    dup = sorted(v for v in vs if graph[v] >= 0)
    head, last = [], []
    if len(assigned) % 2 and new:
        y = new.pop()
        if P[y] < P[assigned[-1]]:
            raise PairLayoutError("no vertex can follow the previous segment")
        head = [y]
    if len(new) % 2:
        last = [new.pop(0)]
    return head + new + last + dup


def _tagged_layer(T: Triangulation, vert_ids, sep_faces, extra_edges, seeds_of, default_tag):
    """Constrained triangulation of separator faces plus boundary edges, with area tags.

    ``seeds_of`` yields (u, w, tag) for directed edges whose left side lies in
    a tagged area. Returns (Triangulation over local ids, tags, local->global).
    """
    tris = T.triangles
    ids = sorted(set(int(v) for v in vert_ids) | set(T.outer))
    local = {v: k for k, v in enumerate(ids)}
    xy = np.array([T.points[v] for v in ids], dtype=np.int64)
    seg = set()
    for a, b, c in tris[sep_faces].tolist():
        for u, w in ((a, b), (b, c), (c, a)):
            seg.add((min(local[u], local[w]), max(local[u], local[w])))
    o = T.outer
    for u, w in list(extra_edges) + [(o[0], o[1]), (o[1], o[2]), (o[2], o[0])]:
        seg.add((min(local[u], local[w]), max(local[u], local[w])))
    lt = constrained_triangulation(xy, np.array(sorted(seg), dtype=np.int64).reshape(-1, 2))
    edge_face = {}
    for t, (a, b, c) in enumerate(lt.tolist()):
        edge_face[a, b] = t
        edge_face[b, c] = t
        edge_face[c, a] = t
    tags = [-1] * len(lt)
    sep_keys = set()
    for a, b, c in tris[sep_faces].tolist():
        k = [local[a], local[b], local[c]]
        tags[edge_face[k[0], k[1]]] = 0
        sep_keys.add(edge_face[k[0], k[1]])
    stack = []
    for u, w, tag in seeds_of():
        t = edge_face[local[u], local[w]]
        if tags[t] < 0:
            tags[t] = tag
            stack.append(t)
        elif tags[t] != tag:
            raise InternalCapacity("one area reached by two tags")
    while stack:
        t = stack.pop()
        a, b, c = lt[t].tolist()
        for u, w in ((a, b), (b, c), (c, a)):
            if (min(u, w), max(u, w)) in seg:
                continue
            s = edge_face[w, u]
            if tags[s] < 0:
                tags[s] = tags[t]
                stack.append(s)
    tags = [default_tag if x < 0 else x for x in tags]
    outer = tuple(local[v] for v in T.outer)
    return Triangulation([tuple(p) for p in xy.tolist()], lt, outer), tags, ids


def _boundary_edges(T: Triangulation, member: np.ndarray, faces) -> list:
    """Directed edges of ``faces`` (face on the left) whose other side is not a member."""
    out = []
    tris, adj = T.triangles, T.adjacency
    for t in faces.tolist():
        row, nb = tris[t], adj[t]
        for k in range(3):
            u = nb[k]
            if u < 0 or not member[u]:
                out.append((int(row[k]), int(row[(k + 1) % 3]), t))
    return out


# -- build -----------------------------------------------------------------------------

def build_index(T: Triangulation, params: BuildParams | None = None, stats: dict | None = None):
    """Permuted points (sorted by graph label) and the serialized index bytes."""
    p = params or BuildParams()
    stats = {} if stats is None else stats
    n, f = T.n, T.f
    P = [tuple(x) for x in T.points]
    tris = T.triangles
    xy = T.xy()
    fkeys = hilbert_keys(xy[tris].sum(axis=1)) if f else np.zeros(0, dtype=np.int64)
    t = min(1.0, lg(f) ** p.a / f)
    part = face_separator(T, t, with_boundaries=False)
    comps = part.components
    regions = _group(comps, t * f, [fkeys[c[0]] for c in comps])
    S = np.sort(part.separator_faces)
    region_of = np.full(f, -1, dtype=np.int64)
    for i, F in enumerate(regions):
        region_of[F] = i
    target = max(lg(n) ** p.b, p.s0)
    g = dual_graph(T)

    # bottom level: units per region
    units, bottom_sep = [], []
    for F in regions:
        ni = len(np.unique(tris[F]))
        if ni > target:
            sub = g[F][:, F]
            ti = min(1.0, target / ni)
            sep = vertex_separator(sub, None, ti)
            parts = _split(sub, F, sep)
            units.append(_group(parts, ti * len(F), [fkeys[c[0]] for c in parts]))
            bottom_sep.append(np.sort(F[sep]))
        else:
            units.append([F])
            bottom_sep.append(np.zeros(0, dtype=np.int64))

    # labels and unit orders
    graph = np.full(n, -1, dtype=np.int64)
    assigned = []
    deferred = []

    def even_out(vs):
        # pair-stable: a segment never leaves a pair open for the next one;
        # an odd one out is labeled with the leftovers and stored through Dt
        if not p.pair_stable:
            return
        new = [v for v in vs if graph[v] < 0]
        if len(new) % 2:
            v = max(new, key=P.__getitem__)
            graph[v] = n
            deferred.append(v)

    region_seqs, unit_orders, explicit = [], [], {}
    graph_new_flags = []
    failures = {}
    for i, F in enumerate(regions):
        rl = {}
        rseq, gflags = [], []
        orders = []
        for j, U in enumerate(units[i]):
            uverts = np.unique(tris[U]).tolist()
            loc = {v: k for k, v in enumerate(uverts)}
            faces = [(loc[a], loc[b], loc[c]) for a, b, c in tris[U].tolist()]
            order = None
            even_out(uverts)
            if p.backend == "permutation" and len(uverts) >= p.codec.min_n:
                layout = None
                if p.pair_stable:
                    layout = PairLayout([graph[v] < 0 for v in uverts], len(assigned) % 2,
                                        P[assigned[-1]] if assigned else None)
                try:
                    lo = encode_faces([P[v] for v in uverts], faces, layout)
                    order = [uverts[k] for k in lo]
                except (CapacityExceeded, PairLayoutError, InternalCapacity) as e:
                    failures[type(e).__name__] = failures.get(type(e).__name__, 0) + 1
            if order is None:
                order = _free_order(uverts, graph, P, p.pair_stable, assigned)
                pos = {v: k for k, v in enumerate(order)}
                explicit[i, j] = [(pos[a], pos[b], pos[c]) for a, b, c in tris[U].tolist()]
            orders.append(order)
            for v in order:
                if v not in rl:
                    rl[v] = len(rseq)
                    rseq.append(v)
                    gflags.append(graph[v] < 0)
                if graph[v] < 0:
                    graph[v] = len(assigned)
                    assigned.append(v)
        tail = [v for v in np.unique(tris[F]).tolist() if v not in rl]
        even_out(tail)
        for v in _free_order(tail, graph, P, p.pair_stable, assigned):
            rl[v] = len(rseq)
            rseq.append(v)
            gflags.append(graph[v] < 0)
            if graph[v] < 0:
                graph[v] = len(assigned)
                assigned.append(v)
        region_seqs.append((rseq, rl))
        graph_new_flags.append(gflags)
        unit_orders.append(orders)
    leftovers = [v for v in range(n) if graph[v] < 0]
    graph[deferred] = -1
    leftovers += deferred
    for v in _free_order(leftovers, graph, P, p.pair_stable, assigned):
        graph[v] = len(assigned)
        assigned.append(v)
    points = [P[v] for v in assigned]

    # label tables
    B, C, D, X = [], [], [], []
    Bt, Ct, Dt = [], [], []
    for i in range(len(regions)):
        rseq, rl = region_seqs[i]
        seen = set()
        for j, order in enumerate(unit_orders[i]):
            X.append(1 if j == 0 else 0)
            for k, v in enumerate(order):
                B.append(1 if k == 0 else 0)
                if v in seen:
                    C.append(0)
                    D.append(rl[v])
                else:
                    seen.add(v)
                    C.append(1)
        for k, v in enumerate(rseq):
            Bt.append(1 if k == 0 else 0)
            if graph_new_flags[i][k]:
                Ct.append(1)
            else:
                Ct.append(0)
                Dt.append(int(graph[v]))

    # point-location layers
    def top_seeds():
        for s in S.tolist():
            for k in range(3):
                nb = T.adjacency[s, k]
                if nb >= 0 and region_of[nb] >= 0:
                    yield int(tris[s, (k + 1) % 3]), int(tris[s, k]), int(region_of[nb]) + 1
        for u, w, face in _boundary_edges(T, np.ones(f, dtype=bool), np.arange(f)):
            if region_of[face] >= 0:
                yield u, w, int(region_of[face]) + 1

    top_T, top_tags, top_ids = _tagged_layer(T, np.unique(tris[S]) if len(S) else [], S, [], top_seeds, -1)
    if min(top_tags) < 0:
        raise InternalCapacity("top layer has an untagged area")
    wtop = BitWriter()
    write_pl(wtop, top_T, top_tags, [int(graph[v]) for v in top_ids])

    wreg = BitWriter()
    reg_off = []
    for i, F in enumerate(regions):
        u = len(units[i])
        if u == 1:
            reg_off.append(0)
            continue
        member = np.zeros(f, dtype=bool)
        member[F] = True
        unit_of = {}
        for j, U in enumerate(units[i]):
            for x in U.tolist():
                unit_of[x] = j
        bnd = _boundary_edges(T, member, F)
        Si = bottom_sep[i]
        sep_member = np.zeros(f, dtype=bool)
        sep_member[Si] = True

        def seeds(Si=Si, bnd=bnd, unit_of=unit_of):
            for s in Si.tolist():
                for k in range(3):
                    nb = int(T.adjacency[s, k])
                    if nb in unit_of:
                        yield int(tris[s, (k + 1) % 3]), int(tris[s, k]), unit_of[nb] + 1
            for a, b, face in bnd:
                if face in unit_of:
                    yield a, b, unit_of[face] + 1

        verts = set(np.unique(tris[Si]).tolist()) | {a for a, _, _ in bnd}
        lay, tags, ids = _tagged_layer(T, sorted(verts), Si, [(a, b) for a, b, _ in bnd], seeds, u + 1)
        inside = sorted(range(len(tags)), key=lambda x: tags[x] == u + 1)
        lay = Triangulation(lay.points, lay.triangles[inside], lay.outer)
        tags = [tags[x] for x in inside]
        rseq, rl = region_seqs[i]
        labels = [rl[v] if v in rl else len(rseq) + list(T.outer).index(v) for v in ids]
        reg_off.append(wreg.tell() + 1)
        write_pl(wreg, lay, tags, labels)
        wreg.pad_to(64)

    wexp = BitWriter()
    exp_off = []
    for i in range(len(regions)):
        for j in range(len(units[i])):
            if (i, j) in explicit:
                exp_off.append(wexp.tell() + 1)
                faces = explicit[i, j]
                width = width_for(len(unit_orders[i][j]))
                wexp.write(len(faces), 32)
                wexp.write(width, 8)
                wexp.write_array(np.array(faces, dtype=np.int64).ravel(), width)
            else:
                exp_off.append(0)

    sections = {}
    w = BitWriter()
    write_bitvec(w, B, "sparse")
    write_bitvec(w, Bt, "sparse")
    sections["LBLB"] = w
    w = BitWriter()
    write_bitvec(w, C, "sparse")
    write_bitvec(w, Ct, "sparse")
    sections["LBLC"] = w
    w = BitWriter()
    write_packed(w, D)
    write_packed(w, Dt)
    sections["LBLD"] = w
    w = BitWriter()
    write_bitvec(w, X, "plain")
    sections["LBLX"] = w
    w = BitWriter()
    w.write(len(regions), 64)
    w.write(len(X), 64)
    w.write(n, 64)
    for v in T.outer:
        w.write(int(graph[v]), 64)
    write_packed(w, reg_off)
    write_packed(w, exp_off)
    sections["DIRS"] = w
    sections["TOPPL"] = wtop
    sections["REGPL"] = wreg
    sections["EXPL"] = wexp
    succinct = not explicit and p.backend == "permutation"
    meta = {
        "params": {"a": p.a, "b": p.b, "s0": p.s0, "backend": p.backend, "pair_stable": p.pair_stable,
                   "codec": asdict(p.codec)},
        "n": n, "regions": len(regions), "units": len(X), "explicit_units": len(explicit),
        "succinct": succinct, "separator_faces": int(len(S)), "t": t, "target": target,
        "encode_failures": failures,
    }
    flags = (FLAG_PAIRS if p.pair_stable else 0) | (FLAG_SUCCINCT if succinct else 0)
    blob = _assemble(sections, meta, p, flags, n)
    stats.update(meta)
    stats["graph_label"] = graph
    stats["region_seqs"] = [rseq for rseq, _ in region_seqs]
    stats["unit_orders"] = unit_orders
    stats["region_faces"] = regions
    stats["unit_faces"] = units
    stats["top_separator"] = S
    stats["bottom_separators"] = bottom_sep
    return points, blob


def _assemble(sections: dict, meta: dict, p: BuildParams, flags: int, n: int) -> bytes:
    payloads = []
    for name in SECTIONS:
        if name == "META":
            payloads.append(json.dumps(meta, sort_keys=True).encode())
        else:
            payloads.append(sections[name].to_bytes())
    head = _HEADER.size + _ENTRY.size * len(SECTIONS)
    off = -(-head // 8) * 8
    table = []
    body = b""
    for name, data in zip(SECTIONS, payloads):
        table.append(_ENTRY.pack(SECTION_TAG[name], off, len(data)))
        pad = -len(data) % 8
        body += data + b"\0" * pad
        off += len(data) + pad
    out = _HEADER.pack(MAGIC, VERSION, len(SECTIONS), float(p.a), float(p.b), int(p.s0), flags, n)
    out += b"".join(table)
    out += b"\0" * (-len(out) % 8)
    return out + body


# -- reader -------------------------------------------------------------------------------

def _read_bytes(src, bit_off: int, nbytes: int) -> bytes:
    out = bytearray()
    for k in range(0, nbytes, 8):
        m = min(8, nbytes - k)
        out += src.read(bit_off + 8 * k, 8 * m).to_bytes(m, "little")
    return bytes(out)


class SuccinctIndex:
    """Query view over a serialized index; ``points[g]`` must return the point of graph label g."""

    def __init__(self, src, base: int = 0, cache_units: int = 0):
        if isinstance(src, (bytes, bytearray)):
            src = BytesSource(src)
        self.src = src
        self.base = base
        head = _read_bytes(src, base, _HEADER.size)
        magic, version, nsec, a, b, s0, flags, n = _HEADER.unpack(head)
        if magic != MAGIC:
            raise ContainerError("bad magic; not an index container")
        if version != VERSION:
            raise ContainerError(f"unsupported container version {version}")
        self.a, self.b, self.s0, self.flags, self.n = a, b, s0, flags, n
        table = _read_bytes(src, base + 8 * _HEADER.size, _ENTRY.size * nsec)
        self.sections = {}
        for k in range(nsec):
            tag, off, length = _ENTRY.unpack_from(table, k * _ENTRY.size)
            name = SECTIONS[tag - 1] if 0 < tag <= len(SECTIONS) else f"#{tag}"
            self.sections[name] = (off, length)
        missing = set(SECTIONS) - set(self.sections)
        if missing:
            raise ContainerError(f"missing sections: {sorted(missing)}")
        at = lambda name: base + 8 * self.sections[name][0]
        self.B = BitVec(src, at("LBLB"))
        self.Bt = BitVec(src, self.B.end)
        self.C = BitVec(src, at("LBLC"))
        self.Ct = BitVec(src, self.C.end)
        self.D = PackedArray(src, at("LBLD"))
        self.Dt = PackedArray(src, self.D.end)
        self.X = BitVec(src, at("LBLX"))
        d = at("DIRS")
        self.regions = src.read(d, 64)
        self.units = src.read(d + 64, 64)
        self.outer = tuple(src.read(d + 192 + 64 * k, 64) for k in range(3))
        self.reg_off = PackedArray(src, d + 384)
        self.exp_off = PackedArray(src, self.reg_off.end)
        self.top = PLStructure(src, at("TOPPL"), None)
        self._regpl_base = at("REGPL")
        self._expl_base = at("EXPL")
        self._bottom = {}
        self.pair_stable = bool(flags & FLAG_PAIRS)
        self.cache_units = cache_units
        self._cache = OrderedDict()

    # sizes ------------------------------------------------------------------
    def size_bits(self) -> dict:
        out = {"HEADER": 8 * (-(-(_HEADER.size + _ENTRY.size * len(self.sections)) // 8) * 8)}
        for name, (_, length) in self.sections.items():
            out[name] = 8 * (length + (-length % 8))
        out["total"] = sum(out.values())
        return out

    def meta(self) -> dict:
        off, length = self.sections["META"]
        return json.loads(_read_bytes(self.src, self.base + 8 * off, length))

    # label conversion (0-based) ------------------------------------------------
    def unit_count(self, i: int) -> int:
        if not 0 <= i < self.regions:
            raise IdOutOfRange(f"region {i + 1} outside 1..{self.regions}")
        first = self.X.select1(i + 1)
        nxt = self.X.select1(i + 2) if i + 1 < self.regions else self.X.n + 1
        return nxt - first

    def unit_size(self, i: int, j: int) -> tuple:
        """(first B position, vertex count) of unit j in region i."""
        x = self.X.select1(i + 1) - 1 + j
        start = self.B.select1(x + 1)
        end = self.B.select1(x + 2) if x + 1 < self.units else self.B.n + 1
        return start, end - start

    def region_size(self, i: int) -> int:
        start = self.Bt.select1(i + 1)
        end = self.Bt.select1(i + 2) if i + 1 < self.regions else self.Bt.n + 1
        return end - start

    def sub_to_region(self, i: int, j: int, k: int) -> int:
        if not 0 <= i < self.regions:
            raise IdOutOfRange(f"region {i + 1} outside 1..{self.regions}")
        x0 = self.X.select1(i + 1) - 1
        x1 = self.X.select1(i + 2) - 1 if i + 1 < self.regions else self.units
        if not 0 <= j < x1 - x0:
            raise IdOutOfRange(f"subregion {j + 1} outside 1..{x1 - x0}")
        start = self.B.select1(x0 + j + 1)
        end = self.B.select1(x0 + j + 2) if x0 + j + 1 < self.units else self.B.n + 1
        l = start + k
        if not 0 <= k < end - start:
            raise IdOutOfRange(f"subregion label {k + 1} outside the subregion")
        if self.C.get(l):
            return self.C.rank1(l) - self.C.rank1(self.B.select1(x0 + 1) - 1) - 1
        return self.D[self.C.rank0(l) - 1]

    def region_to_graph(self, i: int, k: int) -> int:
        if not 0 <= i < self.regions:
            raise IdOutOfRange(f"region {i + 1} outside 1..{self.regions}")
        start = self.Bt.select1(i + 1)
        end = self.Bt.select1(i + 2) if i + 1 < self.regions else self.Bt.n + 1
        l = start + k
        if not 0 <= k < end - start:
            raise IdOutOfRange(f"region label {k + 1} outside region {i + 1}")
        if self.Ct.get(l):
            return self.Ct.rank1(l) - 1
        return self.Dt[self.Ct.rank0(l) - 1]

    def _unit_labels(self, i: int, j: int):
        """Graph labels and graph-new flags for every position of unit (i, j)."""
        x0 = self.X.select1(i + 1) - 1
        rstart = self.B.select1(x0 + 1)
        start, size = self.unit_size(i, j)
        c_before = self.C.rank1(rstart - 1)
        tstart = self.Bt.select1(i + 1)
        labels, new = [], []
        C, Ct = self.C, self.Ct
        for l in range(start, start + size):
            if C.get(l):
                rlab = C.rank1(l) - c_before - 1
            else:
                rlab = self.D[C.rank0(l) - 1]
            lt = tstart + rlab
            if Ct.get(lt):
                labels.append(Ct.rank1(lt) - 1)
                new.append(bool(C.get(l)))
            else:
                labels.append(self.Dt[Ct.rank0(lt) - 1])
                new.append(False)
        return labels, new

    # point location layers ------------------------------------------------------
    def _bottom_pl(self, i: int):
        if i not in self._bottom:
            off = self.reg_off[i]
            self._bottom[i] = None if off == 0 else PLStructure(self.src, self._regpl_base + off - 1, None)
        return self._bottom[i]

    def _bottom_coord(self, i, pts):
        nreg = self.region_size(i)
        outer = self.outer

        def coord(l):
            if l >= nreg:
                return pts[outer[l - nreg]]
            return pts[self.region_to_graph(i, l)]
        return coord

    # unit decoding ------------------------------------------------------------------
    def decode_unit(self, i: int, j: int, pts):
        """(graph labels, points, faces as position triples, real-face flags or None)."""
        key = (i, j)
        if key in self._cache:
            self._cache.move_to_end(key)
            return self._cache[key]
        labels, new = self._unit_labels(i, j)
        upts = [tuple(pts[g]) for g in labels]
        x = self.X.select1(i + 1) - 1 + j
        eo = self.exp_off[x]
        if eo:
            off = self._expl_base + eo - 1
            cnt = self.src.read(off, 32)
            width = self.src.read(off + 32, 8)
            flat = [self.src.read(off + 40 + width * k, width) for k in range(3 * cnt)]
            faces = [tuple(flat[3 * k:3 * k + 3]) for k in range(cnt)]
            data = (labels, upts, faces, None)
        else:
            layout = None
            if self.pair_stable:
                first = next((labels[k] for k in range(len(labels)) if new[k]), 0)
                layout = PairLayout(new, first % 2)
            faces, allp = decode_faces(upts, layout)
            data = (labels, allp, faces, True)
        if self.cache_units:
            self._cache[key] = data
            while len(self._cache) > self.cache_units:
                self._cache.popitem(last=False)
        return data

    def _real(self, i, j, u, face, P, pts):
        a, b, c = (P[x] for x in face)
        q3 = (a[0] + b[0] + c[0], a[1] + b[1] + c[1])
        self.top.coord = pts.__getitem__
        if self.top.locate(q3, 3).tag != i + 1:
            return False
        if u == 1:
            return True
        bp = self._bottom_pl(i)
        bp.coord = self._bottom_coord(i, pts)
        return bp.locate(q3, 3).tag == j + 1

    def _scan(self, i, j, u, q, pts):
        labels, P, faces, coded = self.decode_unit(i, j, pts)
        n_real = len(labels)
        strict, touching = _scan_faces(P, faces, q)
        for face in strict:
            if max(face) < n_real and (coded is None or self._real(i, j, u, face, P, pts)):
                return tuple(sorted(labels[x] for x in face))
        best = None
        for face in touching:
            if max(face) < n_real and (coded is None or self._real(i, j, u, face, P, pts)):
                lab = tuple(sorted(labels[x] for x in face))
                if best is None or lab < best:
                    best = lab
        if best is None:
            raise InternalCapacity("no subregion face contains the query point")
        return best

    def locate(self, pts, q) -> tuple:
        """Ascending 0-based graph labels of a triangle of T that closed-contains q."""
        q = (int(q[0]), int(q[1]))
        self.top.coord = pts.__getitem__
        hit = self.top.locate(q)
        if hit.tag == 0:
            return tuple(sorted(hit.labels))
        i = hit.tag - 1
        u = self.unit_count(i)
        j = 0
        if u > 1:
            bp = self._bottom_pl(i)
            bp.coord = self._bottom_coord(i, pts)
            bh = bp.locate(q)
            if bh.tag == 0:
                return tuple(sorted(self.region_to_graph(i, l) for l in bh.labels))
            if bh.tag > u:
                raise InternalCapacity("bottom layer placed an in-region point outside")
            j = bh.tag - 1
        return self._scan(i, j, u, q, pts)


# float64 orientation error stays far below this for coordinates under 2^34
_FILTER = float(1 << 24)


def _scan_faces(P, faces, q):
    """Faces strictly containing q and faces containing it on their boundary."""
    add_orient_calls(3 * len(faces))
    if not faces:
        return [], []
    xy = np.array(P, dtype=np.float64)
    F = np.array(faces, dtype=np.int64)
    qx, qy = float(q[0]), float(q[1])
    keep = np.ones(len(F), dtype=bool)
    for k in range(3):
        a = xy[F[:, k]]
        b = xy[F[:, (k + 1) % 3]]
        d = (b[:, 0] - a[:, 0]) * (qy - a[:, 1]) - (b[:, 1] - a[:, 1]) * (qx - a[:, 0])
        keep &= d > -_FILTER
    strict, touching = [], []
    for t in np.flatnonzero(keep).tolist():
        face = faces[t]
        a, b, c = (P[x] for x in face)
        da = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
        db = (c[0] - b[0]) * (q[1] - b[1]) - (c[1] - b[1]) * (q[0] - b[0])
        dc = (a[0] - c[0]) * (q[1] - c[1]) - (a[1] - c[1]) * (q[0] - c[0])
        if da > 0 and db > 0 and dc > 0:
            strict.append(face)
        elif da >= 0 and db >= 0 and dc >= 0:
            touching.append(face)
    return strict, touching


# -- public functions (1-based ids and labels) ----------------------------------------------

def load_index(blob, cache_units: int = 0) -> SuccinctIndex:
    return SuccinctIndex(BytesSource(blob), 0, cache_units)


def locate(ix: SuccinctIndex, pts, q) -> tuple:
    """Ascending 1-based graph labels of a triangle containing q."""
    return tuple(g + 1 for g in ix.locate(pts, q))


def sub_to_region(ix: SuccinctIndex, i: int, j: int, k: int) -> int:
    return ix.sub_to_region(i - 1, j - 1, k - 1) + 1


def region_to_graph(ix: SuccinctIndex, i: int, k: int) -> int:
    return ix.region_to_graph(i - 1, k - 1) + 1


def index_size_bits(ix: SuccinctIndex) -> dict:
    return ix.size_bits()
