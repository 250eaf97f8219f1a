"""Acceptance criteria 1-10 at their stated sizes and tolerances.

Each test records one PASS/FAIL line (printed in the terminal summary) and
then asserts. Meshes and index builds are shared through module caches.
"""
import math
import random
import statistics
import time
from functools import lru_cache

import numpy as np
import pytest

from sgindex.bitvec import bv_build, bv_rank, bv_select, primitive_ops
from sgindex.geom import orient_calls, point_in_triangle
from sgindex.harness import fit_work, oracle_locate, query_points
from sgindex.implicit import implicit_build, implicit_index, implicit_locate, implicit_read_bit
from sgindex.index import BuildParams, build_index, load_index, region_to_graph, sub_to_region
from sgindex.mesh import gen_random, random_subdivision
from sgindex.permcode import decode_subdivision, decode_triangulation, encode_subdivision, encode_triangulation
from sgindex.separator import component_stats, face_separator

pytestmark = pytest.mark.acceptance


@lru_cache(maxsize=None)
def mesh(n, seed=1):
    return gen_random(n, seed)


@lru_cache(maxsize=None)
def built(n, seed=1):
    """(points, blob, stats, build seconds) for the default parameters."""
    T = mesh(n, seed)
    st = {}
    t0 = time.perf_counter()
    pts, blob = build_index(T, BuildParams(), st)
    return pts, blob, st, time.perf_counter() - t0


def _faces(T):
    return {tuple(sorted(T.points[v] for v in t)) for t in T.triangles.tolist()}


def _record(acc, k, ok, detail):
    acc[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}")


def test_c1_codec_roundtrip(acceptance):
    sizes = [2048] * 34 + [8192] * 33 + [50_000] * 33
    failures, times = 0, []
    for i, n in enumerate(sizes):
        T = gen_random(n, 1000 + i)
        t0 = time.perf_counter()
        order = encode_triangulation(T)
        D = decode_triangulation([T.points[v] for v in order])
        dt = time.perf_counter() - t0
        if n == 50_000:
            times.append(dt)
        if sorted(D.points) != sorted(T.points) or _faces(D) != _faces(T):
            failures += 1
    mean = statistics.mean(times)
    ok = failures == 0 and mean <= 5.0
    _record(acceptance, 1, ok, f"{failures}/100 failures, encode+decode at 50000: mean {mean:.2f}s "
                               f"max {max(times):.2f}s (limit 5s)")
    assert ok


def test_c2_subdivision_roundtrip(acceptance):
    sizes = [16384] * 13 + [50_000] * 12
    failures = 0
    for i, n in enumerate(sizes):
        G = random_subdivision(gen_random(n, 2000 + i), 0.1, 2000 + i)
        order = encode_subdivision(G)
        D = decode_subdivision([G.points[v] for v in order])
        failures += D.edge_points() != G.edge_points()
    _record(acceptance, 2, failures == 0, f"{failures}/25 failures")
    assert failures == 0


def test_c3_query_correctness(acceptance):
    report, bad = [], 0
    for n in (2 ** 14, 2 ** 17):
        T = mesh(n)
        pts, blob, st, _ = built(n)
        g = st["graph_label"]
        ix = load_index(blob, cache_units=4096)
        interior = boundary = 0
        for q in query_points(T, 10_000, 77).tolist():
            labels = ix.locate(pts, q)
            f = oracle_locate(T, q)
            corners = [T.points[v] for v in T.triangles[f]]
            if point_in_triangle(q, *corners).kind == "inside":
                interior += 1
                bad += sorted(labels) != sorted(int(g[v]) for v in T.triangles[f])
            else:
                boundary += 1
                bad += not point_in_triangle(q, *(pts[x] for x in labels)).contains
        report.append(f"n={n}: {interior} interior, {boundary} boundary")
    _record(acceptance, 3, bad == 0, f"{bad} disagreements ({'; '.join(report)})")
    assert bad == 0


def test_c4_space_proxy(acceptance):
    small = [built(2 ** 14, s)[1] for s in (1, 2, 3)]
    bpv14 = statistics.mean(8 * len(b) / 2 ** 14 for b in small)
    n = 2 ** 20
    blob = built(n)[1]
    bits20 = 8 * len(blob)
    bpv20 = bits20 / n
    ok = bpv20 <= 0.8 * bpv14 and bits20 < n
    _record(acceptance, 4, ok, f"bpv(2^14)={bpv14:.2f} (3 seeds), bpv(2^20)={bpv20:.2f}, "
                               f"ratio {bpv20 / bpv14:.2f} (need <= 0.8), total {bits20} bits vs n={n}")
    assert ok


def test_c5_separator_contracts(acceptance):
    worst, hard_ok, soft_ok = [], True, True
    for n in (2 ** 14, 2 ** 17, 2 ** 20):
        T = mesh(n)
        f = T.f
        t = math.log2(f) ** 3 / f
        s = component_stats(face_separator(T, t), T)
        env = 8 * math.sqrt(f / t)
        hard_ok &= s["max_component"] <= t * f
        soft_ok &= max(s["separator_size"], s["components"], s["duplication_sum"]) <= env
        worst.append(f"n={n}: |S|={s['separator_size']} comps={s['components']} "
                     f"dup={s['duplication_sum']} env={env:.0f}")
    # the hard bound also holds for the regions of the index builds
    for n in (2 ** 14, 2 ** 17, 2 ** 20):
        _, blob, st, _ = built(n)
        meta = load_index(blob).meta()
        hard_ok &= all(len(F) <= meta["t"] * mesh(n).f for F in st["region_faces"])
    ok = hard_ok and soft_ok
    _record(acceptance, 5, ok, f"hard {'ok' if hard_ok else 'violated'}, soft {'ok' if soft_ok else 'violated'}"
                               f" ({'; '.join(worst)})")
    assert ok


def test_c6_bit_vectors(acceptance):
    rng = random.Random(6)
    mismatches = 0
    for mode, density in (("plain", 0.5), ("sparse", 0.05)):
        n = 100_000
        bits = np.array([rng.random() < density for _ in range(n)], dtype=np.int64)
        v = bv_build(bits.tolist(), mode)
        prefix = np.concatenate([[0], np.cumsum(bits)])
        ones = np.flatnonzero(bits) + 1
        zeros = np.flatnonzero(bits == 0) + 1
        for _ in range(125_000):
            p = rng.randint(1, n)
            mismatches += bv_rank(v, 1, p) != prefix[p]
            mismatches += bv_rank(v, 0, p) != p - prefix[p]
            r = rng.randint(1, len(ones))
            mismatches += bv_select(v, 1, r) != ones[r - 1]
            r = rng.randint(1, len(zeros))
            mismatches += bv_select(v, 0, r) != zeros[r - 1]
    big = bv_build([rng.getrandbits(1) for _ in range(1 << 20)], "plain")
    overhead = big.overhead_bits() / big.length
    # structured inputs: runs, periodic, single bits at the ends
    m = 20_000
    patterns = [[1] * m, [0] * (m - 1) + [1], [1] + [0] * (m - 1), [i % 2 for i in range(m)],
                [int(i % 700 < 350) for i in range(m)], [int(i % 97 == 0) for i in range(m)]]
    inverse_fail, probes = 0, 0
    for bits in patterns:
        for mode in ("plain", "sparse"):
            v = bv_build(bits, mode)
            for lab in (0, 1):
                c = v.count(lab)
                for r in range(1, c + 1, max(1, c // 400)):
                    probes += 1
                    inverse_fail += bv_rank(v, lab, bv_select(v, lab, r)) != r
            for p in range(1, len(bits) + 1, 2):
                probes += 1
                lab = bits[p - 1]
                inverse_fail += bv_select(v, lab, bv_rank(v, lab, p)) != p
    ok = mismatches == 0 and overhead <= 0.35 and inverse_fail == 0 and probes >= 100_000
    _record(acceptance, 6, ok, f"{mismatches} mismatches in 10^6 probes, plain overhead {overhead:.3f}n, "
                               f"{inverse_fail} inverse failures in {probes} structured probes")
    assert ok


def test_c7_label_tables(acceptance):
    pts, blob, st, _ = built(2 ** 17)
    ix = load_index(blob)
    g = st["graph_label"]
    rng = random.Random(7)
    wrong, max_ops = 0, 0
    for _ in range(100_000):
        i = rng.randrange(ix.regions)
        orders = st["unit_orders"][i]
        j = rng.randrange(len(orders))
        k = rng.randrange(len(orders[j]))
        before = primitive_ops()
        r = sub_to_region(ix, i + 1, j + 1, k + 1)
        mid = primitive_ops()
        x = region_to_graph(ix, i + 1, r)
        after = primitive_ops()
        max_ops = max(max_ops, mid - before, after - mid)
        v = orders[j][k]
        wrong += st["region_seqs"][i][r - 1] != v or x != g[v] + 1
    ok = wrong == 0 and max_ops <= 8
    _record(acceptance, 7, ok, f"{wrong} wrong of 10^5 probes, at most {max_ops} rank/select/access calls "
                               f"per conversion ({ix.regions} regions, {ix.units} units)")
    assert ok


def test_c8_build_scaling(acceptance):
    t18 = built(2 ** 18)[3]
    t20 = built(2 ** 20)[3]
    ok = t20 <= 5 * t18 and t20 <= 120
    _record(acceptance, 8, ok, f"build 2^18 {t18:.1f}s, 2^20 {t20:.1f}s, ratio {t20 / t18:.2f} "
                               f"(need <= 5 and <= 120s)")
    assert ok


def test_c9_query_work(acceptance):
    runs = []
    for n in (2 ** 14, 2 ** 17, 2 ** 20):
        T = mesh(n)
        pts, blob, st, _ = built(n)
        ix = load_index(blob)  # no unit cache: every query pays its decode
        counts = []
        for q in query_points(T, 200, 99).tolist():
            before = orient_calls()
            ix.locate(pts, q)
            counts.append(orient_calls() - before)
        runs.append({"n": n, "s0": BuildParams().s0, "orient_mean": float(np.mean(counts))})
    fit = fit_work(runs)
    ok = fit["C1"] <= 64
    means = ", ".join(f"{r['n']}: {r['orient_mean']:.0f}" for r in runs)
    _record(acceptance, 9, ok, f"C1={fit['C1']:.2f} C2={fit['C2']:.2f} (mean orient calls {means})")
    assert ok


def test_c10_implicit(acceptance):
    n = 2 ** 17
    T = mesh(n)
    params = BuildParams(pair_stable=True)
    pts, blob = build_index(T, params)
    arr = implicit_build(T, params, allow_overflow=True)
    multiset = sorted(arr.points) == sorted(pts) == sorted(T.points)
    stream = int.from_bytes(blob[6:], "little")
    cap = arr.capacity
    bits_ok = all(implicit_read_bit(arr, t) == (stream >> (t - 1)) & 1 for t in range(1, cap + 1))
    ix = load_index(blob)
    view = implicit_index(arr, cache_units=4096)
    disagree = 0
    for q in query_points(T, 1000, 5).tolist():
        disagree += implicit_locate(arr, q, view) != tuple(x + 1 for x in ix.locate(pts, q))
    fits = arr.nbits <= n // 2
    ok = multiset and bits_ok and disagree == 0 and fits
    _record(acceptance, 10, ok, f"multiset {'ok' if multiset else 'changed'}, read_bit "
                                f"{'ok' if bits_ok else 'wrong'} on {cap} positions, {disagree}/1000 "
                                f"disagreements, stream {arr.nbits} bits vs capacity {n // 2}")
    assert ok
