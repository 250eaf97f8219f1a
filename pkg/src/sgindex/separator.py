"""Weighted t-separators and t-face separators.

The vertex separator splits over-weight components by removing one BFS level
(chosen near the weighted median, preferring small levels) and recurses until
every component is light enough. A final pass returns separator vertices to
the graph whenever that cannot create an over-weight component.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import ParamError
from .mesh import Triangulation, dual_graph


def _components(g: sp.csr_matrix, alive: np.ndarray):
    """Connected components restricted to alive nodes; labels -1 elsewhere."""
    idx = np.flatnonzero(alive)
    sub = g[idx][:, idx]
    k, lab = csgraph.connected_components(sub, directed=False)
    labels = np.full(g.shape[0], -1, dtype=np.int64)
    labels[idx] = lab
    return k, labels


def _split_level(sub: sp.csr_matrix, w: np.ndarray) -> np.ndarray:
    """Indices (into sub) of one BFS level whose removal balances the weight."""
    order = csgraph.breadth_first_order(sub, 0, directed=False, return_predecessors=False)
    root = int(order[-1])
    dist = csgraph.shortest_path(sub, unweighted=True, indices=root, directed=False)
    dist = np.where(np.isinf(dist), -1, dist).astype(np.int64)
    reach = dist >= 0
    lv = dist[reach]
    wl = np.bincount(lv, weights=w[reach])
    cnt = np.bincount(lv)
    total = wl.sum()
    below = np.concatenate([[0.0], np.cumsum(wl)[:-1]])
    above = total - below - wl
    worst = np.maximum(below, above)
    ok = np.flatnonzero(worst <= 0.75 * total)
    if ok.size:
        best = ok[np.argmin(cnt[ok] * (1.0 + worst[ok] / total))]
    else:
        best = int(np.argmin(worst))
    return np.flatnonzero(dist == best)


def vertex_separator(g, weights=None, t: float = 0.5) -> np.ndarray:
    """Sorted node ids whose removal leaves no component heavier than t*w(g)."""
    if not (0 < t <= 1):
        raise ParamError(f"t must lie in (0, 1], got {t}")
    g = sp.csr_matrix(g)
    n = g.shape[0]
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.shape != (n,) or (w < 0).any() or not np.isfinite(w).all():
        raise ParamError("weights must be finite, nonnegative, one per vertex")
    total = float(w.sum())
    bound = t * total
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    sep = w > bound
    alive = ~sep
    k, labels = _components(g, alive)
    cw = np.bincount(labels[alive], weights=w[alive], minlength=k) if k else np.zeros(0)
    stack = [np.flatnonzero(labels == c) for c in np.flatnonzero(cw > bound)]
    while stack:
        nodes = stack.pop()
        sub = g[nodes][:, nodes]
        cut = _split_level(sub, w[nodes])
        sep[nodes[cut]] = True
        keep = np.ones(len(nodes), dtype=bool)
        keep[cut] = False
        rest = nodes[keep]
        if rest.size == 0:
            continue
        kk, lab = csgraph.connected_components(sub[keep][:, keep], directed=False)
        pw = np.bincount(lab, weights=w[rest], minlength=kk)
        for c in np.flatnonzero(pw > bound):
            stack.append(rest[lab == c])
    _unseparate(g, w, sep, bound)
    return np.flatnonzero(sep)


def _unseparate(g, w, sep, bound) -> None:
    """Greedily return separator nodes to the graph while the bound holds."""
    n = len(w)
    k, labels = _components(g, ~sep)
    parent = list(range(k))
    cw = np.bincount(labels[labels >= 0], weights=w[labels >= 0], minlength=k).tolist()
    indptr, indices = g.indptr, g.indices
    lab = labels.tolist()

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    wl = w.tolist()
    for _ in range(2):
        changed = False
        for v in np.flatnonzero(sep).tolist():
            roots = set()
            for u in indices[indptr[v]:indptr[v + 1]].tolist():
                if lab[u] >= 0:
                    roots.add(find(lab[u]))
            merged = wl[v] + sum(cw[r] for r in roots)
            if merged > bound:
                continue
            if roots:
                r0 = roots.pop()
                for r in roots:
                    parent[r] = r0
                cw[r0] = merged
            else:
                r0 = len(parent)
                parent.append(r0)
                cw.append(merged)
            lab[v] = r0
            sep[v] = False
            changed = True
        if not changed:
            break


@dataclass
class FacePartition:
    separator_faces: np.ndarray
    components: list
    t: float
    f: int
    boundaries: list = field(default_factory=list)
    face_component: np.ndarray = field(default=None, repr=False)
    weights: np.ndarray = field(default=None, repr=False)

    def bound(self) -> float:
        total = self.f if self.weights is None else float(self.weights.sum())
        return self.t * total


def boundary_cycles(T: Triangulation, faces: np.ndarray, member: np.ndarray) -> list:
    """Edge-disjoint simple boundary cycles of a face set (component on the left)."""
    tris = T.triangles[faces]
    adj = T.adjacency[faces]
    out_edges = {}
    for row, nb in zip(tris.tolist(), adj.tolist()):
        for k in range(3):
            u = nb[k]
            if u < 0 or not member[u]:
                out_edges.setdefault(row[k], []).append(row[(k + 1) % 3])
    for lst in out_edges.values():
        lst.sort(reverse=True)
    cycles = []
    for start in sorted(out_edges):
        while out_edges.get(start):
            path = [start]
            where = {start: 0}
            v = start
            while True:
                nxt = out_edges[v].pop()
                if nxt == start:
                    cycles.append(path)
                    break
                if nxt in where:
                    i = where[nxt]
                    cycles.append(path[i:])
                    for x in path[i + 1:]:
                        del where[x]
                    path = path[: i + 1]
                    v = nxt
                    continue
                where[nxt] = len(path)
                path.append(nxt)
                v = nxt
    return cycles


def partition_from_separator(T: Triangulation, sep_faces, t: float, weights=None,
                             with_boundaries: bool = True) -> FacePartition:
    f = T.f
    sep = np.zeros(f, dtype=bool)
    sep[np.asarray(sep_faces, dtype=np.int64)] = True
    g = dual_graph(T)
    k, labels = _components(g, ~sep)
    order = np.argsort(labels, kind="stable")
    counts = np.bincount(labels[labels >= 0], minlength=k)
    start = int((labels < 0).sum())
    comps = []
    for c in range(k):
        comps.append(order[start:start + counts[c]])
        start += counts[c]
    p = FacePartition(np.flatnonzero(sep), comps, t, f, face_component=labels,
                      weights=None if weights is None else np.asarray(weights, dtype=np.float64))
    if with_boundaries:
        for c in comps:
            member = np.zeros(f, dtype=bool)
            member[c] = True
            cyc = boundary_cycles(T, c, member)
            assert cyc, "component without boundary"
            p.boundaries.append(cyc)
    return p


def face_separator(T: Triangulation, t: float, face_weights=None,
                   with_boundaries: bool = True) -> FacePartition:
    """t-face separator via the dual graph, with its components."""
    if not (0 < t <= 1):
        raise ParamError(f"t must lie in (0, 1], got {t}")
    g = dual_graph(T)
    sep = vertex_separator(g, face_weights, t)
    return partition_from_separator(T, sep, t, face_weights, with_boundaries)


def duplication_degrees(T: Triangulation, p: FacePartition) -> np.ndarray:
    """Number of components each vertex belongs to."""
    lab = p.face_component
    keep = lab >= 0
    verts = T.triangles[keep]
    comp = np.repeat(lab[keep], 3)
    pairs = np.unique(verts.ravel().astype(np.int64) * (len(p.components) + 1) + comp)
    return np.bincount(pairs // (len(p.components) + 1), minlength=T.n)


def component_stats(p: FacePartition, T: Triangulation | None = None) -> dict:
    """Component count, separator size and duplication-degree sum."""
    sizes = [len(c) for c in p.components]
    out = {
        "components": len(p.components),
        "separator_size": int(len(p.separator_faces)),
        "max_component": max(sizes) if sizes else 0,
        "bound": p.bound(),
    }
    if T is not None and p.boundaries:
        dd = duplication_degrees(T, p)
        on_boundary = np.zeros(T.n, dtype=bool)
        edges = 0
        for cycles in p.boundaries:
            for cyc in cycles:
                on_boundary[cyc] = True
                edges += len(cyc)
        out["duplication_sum"] = int(dd[on_boundary].sum())
        out["boundary_edges"] = edges
    return out
