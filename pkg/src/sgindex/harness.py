"""Brute-force oracle, benchmark driver and the command-line entry point."""
import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import geom
from .errors import OutsideHull, SgiError
from .implicit import ImplicitArray, implicit_build, implicit_locate
from .index import BuildParams, build_index, load_index
from .mesh import Triangulation, dump_pts, dump_tri, gen_random, load_pts, load_tri, sample_in_triangle
from .permcode import CodecConfig, decode_triangulation, encode_triangulation


def _corners(T: Triangulation):
    """Face corner coordinates (f, 3, 2) and x-extents, cached on T."""
    c = getattr(T, "_corners", None)
    if c is None or len(c[0]) != T.f:
        xy = T.xy()[T.triangles]
        c = (xy, xy[:, :, 0].min(axis=1), xy[:, :, 0].max(axis=1))
        T._corners = c
    return c


def _orient_all(corners, q):
    """Signed orientations of q against each directed edge, shape (f, 3), exact in int64."""
    qx, qy = int(q[0]), int(q[1])
    out = np.empty(corners.shape[:2], dtype=np.int64)
    for k in range(3):
        a = corners[:, k]
        b = corners[:, (k + 1) % 3]
        out[:, k] = (b[:, 0] - a[:, 0]) * (qy - a[:, 1]) - (b[:, 1] - a[:, 1]) * (qx - a[:, 0])
    return out


def oracle_locate(T: Triangulation, q) -> int:
    """Smallest id of a face of T whose closed triangle holds q (linear scan)."""
    a, b, c = (T.points[v] for v in T.outer)
    if not geom.point_in_triangle(q, a, b, c).contains:
        raise OutsideHull()
    xy, lo, hi = _corners(T)
    # the x-extent filter is exact, it only skips faces that cannot hold q
    ids = np.flatnonzero((lo <= q[0]) & (hi >= q[0]))
    d = _orient_all(xy[ids], q)
    hits = ids[(d >= 0).all(axis=1)]
    if len(hits) == 0:
        raise OutsideHull()
    return int(hits[0])


def query_points(T: Triangulation, count: int, seed: int) -> np.ndarray:
    """Uniform integer queries strictly inside the outer triangle."""
    rng = np.random.default_rng(seed)
    return sample_in_triangle(rng, [T.points[v] for v in T.outer], count, strict=True)


# -- bench -----------------------------------------------------------------------------

def bench_cell(n: int, seed: int, queries: int, params: BuildParams) -> dict:
    T = gen_random(n, seed)
    t0 = time.perf_counter()
    pts, blob = build_index(T, params)
    build_s = time.perf_counter() - t0
    ix = load_index(blob)
    qs = query_points(T, queries, seed + 1)
    times, orients = [], []
    for q in qs.tolist():
        o = geom.orient_calls()
        t = time.perf_counter_ns()
        ix.locate(pts, q)
        times.append(time.perf_counter_ns() - t)
        orients.append(geom.orient_calls() - o)
    sizes = ix.size_bits()
    return {
        "n": n, "seed": seed, "bits": sizes["total"], "bpv": sizes["total"] / n,
        "build_s": build_s, "q_ns_mean": float(np.mean(times)) if times else 0.0,
        "q_ns_p99": float(np.percentile(times, 99)) if times else 0.0,
        "orient_mean": float(np.mean(orients)) if orients else 0.0,
        "backend": params.backend, "sections": sizes, "s0": params.s0,
    }


def fit_work(runs) -> dict:
    """Least-squares fit of mean orient calls to C1*lg n + C2*s0, one point per size."""
    by_n = {}
    for r in runs:
        by_n.setdefault(r["n"], []).append(r)
    rows, rhs = [], []
    for n, rs in sorted(by_n.items()):
        rows.append([math.log2(n), float(rs[0]["s0"])])
        rhs.append(float(np.mean([r["orient_mean"] for r in rs])))
    if not rows:
        return {"C1": None, "C2": None}
    (c1, c2), *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    return {"C1": float(c1), "C2": float(c2), "points": [[r[0], y] for r, y in zip(rows, rhs)]}


def bench(sizes, queries: int, seeds: int, params: BuildParams, log=None) -> dict:
    runs = []
    for n in sizes:
        for seed in range(1, seeds + 1):
            cell = bench_cell(n, seed, queries, params)
            runs.append(cell)
            if log:
                log(f"n={n} seed={seed} bpv={cell['bpv']:.2f} build={cell['build_s']:.1f}s "
                    f"orient={cell['orient_mean']:.0f}")
    return {"runs": runs, "fit": fit_work(runs)}


# -- verification ------------------------------------------------------------------------

def verify(T: Triangulation, full: bool = False, queries: int = 200, seed: int = 1) -> list:
    """Codec roundtrip plus an oracle sweep; returns a list of problems."""
    problems = []
    cfg = CodecConfig()
    if T.n >= cfg.min_n:
        order = encode_triangulation(T, cfg)
        D = decode_triangulation([T.points[v] for v in order], cfg)
        if _face_points(D) != _face_points(T):
            problems.append("codec roundtrip changed the face set")
    pts, blob = build_index(T, BuildParams())
    ix = load_index(blob)
    xy = T.xy()
    if full:
        qs = [tuple(int(c) for c in row) for row in (xy[T.triangles].sum(axis=1) // 3).tolist()]
    else:
        qs = [tuple(q) for q in query_points(T, queries, seed).tolist()]
    for q in qs:
        labels = ix.locate(pts, q)
        a, b, c = (pts[g] for g in labels)
        if geom.orient(a, b, c) == 0 or not geom.point_in_triangle(q, a, b, c).contains:
            problems.append(f"query {q}: answer does not contain the point")
            continue
        f = oracle_locate(T, q)
        want = sorted(T.points[v] for v in T.triangles[f])
        if geom.point_in_triangle(q, *want).kind == "inside" and sorted((a, b, c)) != want:
            problems.append(f"query {q}: answer differs from the oracle")
    return problems


def _face_points(T: Triangulation) -> set:
    return {tuple(sorted(T.points[v] for v in t)) for t in T.triangles.tolist()}


# -- CLI -------------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _point(text: str):
    parts = text.replace(",", " ").split()
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'x y', got {text!r}")
    return int(parts[0]), int(parts[1])


def _sizes(text: str):
    return [int(s) for s in text.split(",") if s]


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sgindex", description="Succinct geometric index over planar triangulations.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="random triangulation")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=1)
    g.add_argument("--out", required=True)

    b = sub.add_parser("build", help="build points + index")
    b.add_argument("--input", required=True)
    b.add_argument("--out-points", required=True)
    b.add_argument("--out-index", required=True)
    b.add_argument("--a", type=float, default=3.0)
    b.add_argument("--b", type=float, default=1.0)
    b.add_argument("--s0", type=int, default=2048)
    b.add_argument("--backend", choices=("perm", "explicit"), default="perm")

    q = sub.add_parser("query", help="locate one point")
    q.add_argument("--points", required=True)
    q.add_argument("--index", required=True)
    q.add_argument("--at", type=_point, required=True)

    bq = sub.add_parser("batch-query", help="locate every point of a file")
    bq.add_argument("--points", required=True)
    bq.add_argument("--index", required=True)
    bq.add_argument("--queries", required=True)

    v = sub.add_parser("verify", help="codec roundtrip and oracle sweep")
    v.add_argument("--input", required=True)
    v.add_argument("--full", action="store_true")

    be = sub.add_parser("bench", help="size and query benchmark")
    be.add_argument("--sizes", type=_sizes, default=[16384, 131072, 1048576])
    be.add_argument("--queries", type=int, default=10000)
    be.add_argument("--seeds", type=int, default=5)
    be.add_argument("--report", required=True)
    be.add_argument("--s0", type=int, default=2048)
    be.add_argument("--backend", choices=("perm", "explicit"), default="perm")

    ib = sub.add_parser("implicit-build", help="embed the index into the point order")
    ib.add_argument("--input", required=True)
    ib.add_argument("--out", required=True)

    iq = sub.add_parser("implicit-query", help="locate using only an implicit point file")
    iq.add_argument("--points", required=True)
    iq.add_argument("--at", type=_point, required=True)
    return p


def _backend(name: str) -> str:
    return "permutation" if name == "perm" else "explicit"


def _load_query_pair(args):
    pts = load_pts(Path(args.points).read_text())
    ix = load_index(Path(args.index).read_bytes())
    if len(pts) != ix.n:
        raise SgiError(f"point file has {len(pts)} points, index expects {ix.n}")
    return pts, ix


def _main(args) -> int:
    out = sys.stdout
    if args.cmd == "gen":
        T = gen_random(args.n, args.seed)
        Path(args.out).write_text(dump_tri(T))
    elif args.cmd == "build":
        T = load_tri(Path(args.input).read_text())
        params = BuildParams(a=args.a, b=args.b, s0=args.s0, backend=_backend(args.backend))
        pts, blob = build_index(T, params)
        Path(args.out_points).write_text(dump_pts(pts))
        Path(args.out_index).write_bytes(blob)
        print(f"{len(blob) * 8} bits, {len(blob) * 8 / T.n:.2f} bits per vertex", file=sys.stderr)
    elif args.cmd == "query":
        pts, ix = _load_query_pair(args)
        print(" ".join(str(g + 1) for g in ix.locate(pts, args.at)), file=out)
    elif args.cmd == "batch-query":
        pts, ix = _load_query_pair(args)
        ix.cache_units = 64
        status = 0
        for k, line in enumerate(Path(args.queries).read_text().splitlines()):
            if not line.strip():
                continue
            try:
                q = _point(line)
            except argparse.ArgumentTypeError as e:
                print(f"line {k + 1}: {e}", file=sys.stderr)
                return 1
            try:
                print(" ".join(str(g + 1) for g in ix.locate(pts, q)), file=out)
            except OutsideHull as e:
                print(f"line {k + 1}: {e}", file=sys.stderr)
                print("-", file=out)
                status = 1
        return status
    elif args.cmd == "verify":
        T = load_tri(Path(args.input).read_text())
        problems = verify(T, args.full)
        for msg in problems:
            print(msg, file=sys.stderr)
        print("ok" if not problems else f"{len(problems)} problems", file=out)
        return 1 if problems else 0
    elif args.cmd == "bench":
        params = BuildParams(s0=args.s0, backend=_backend(args.backend))
        report = bench(args.sizes, args.queries, args.seeds, params,
                       log=lambda m: print(m, file=sys.stderr))
        Path(args.report).write_text(json.dumps(report, indent=1))
    elif args.cmd == "implicit-build":
        T = load_tri(Path(args.input).read_text())
        arr = implicit_build(T)
        Path(args.out).write_text(dump_pts(arr.points))
    elif args.cmd == "implicit-query":
        pts = load_pts(Path(args.points).read_text())
        arr = ImplicitArray(pts, len(pts) // 2)
        print(" ".join(map(str, implicit_locate(arr, args.at))), file=out)
    return 0


def run(argv=None) -> int:
    """Run one CLI command; 0 success, 1 validation or query failure, 2 usage error."""
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return _main(args)
    except (SgiError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
