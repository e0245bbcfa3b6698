"""Time the compiled kernels against the pure-python fallback.

Runs each hot kernel (edge/triangle enumeration, coboundary value fills)
on random clouds of a few sizes and prints per-backend timings plus the
speedup. Results double as a sanity check: both backends must return
bit-identical arrays or the run aborts.

Usage:
    python3 benchmarks/bench_kernels.py [--sizes 50,100,200] [--repeats 5]
"""

import argparse
import sys
import time

import numpy as np

from pslap.kernels import available_backends


def _median_time(fn, repeats):
    best = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best.append(time.perf_counter() - t0)
    return float(np.median(best)), out


def _check_equal(name, a, b):
    if isinstance(a, tuple):
        pairs = zip(a, b)
    else:
        pairs = [(a, b)]
    for x, y in pairs:
        if not (np.array_equal(x, y) and x.dtype == y.dtype):
            sys.exit(f"backend mismatch in {name}: outputs differ")


def bench(n, repeats, rng):
    coords = rng.uniform(0.0, 10.0, size=(n, 3))
    charges = rng.uniform(-1.0, 1.0, size=n)
    dist = np.linalg.norm(coords[:, None] - coords[None, :], axis=-1)
    np.fill_diagonal(dist, 0.0)
    max_scale = 6.0

    backends = available_backends()
    if len(backends) < 2:
        sys.exit("compiled backend unavailable; nothing to compare")
    py, cy = backends["python"], backends["cython"]

    u, v, edge_vals = py.vr_edges(dist, max_scale)
    i, j, k, tri_vals = py.vr_triangles(dist, max_scale)

    cases = {
        "vr_edges": lambda mod: mod.vr_edges(dist, max_scale),
        "vr_triangles": lambda mod: mod.vr_triangles(dist, max_scale),
        "d0_values": lambda mod: mod.d0_values(u, v, charges, dist, True),
        "d1_values": lambda mod: mod.d1_values(i, j, k, charges, dist, True),
    }

    rows = []
    for name, call in cases.items():
        t_py, out_py = _median_time(lambda: call(py), repeats)
        t_cy, out_cy = _median_time(lambda: call(cy), repeats)
        _check_equal(name, out_py, out_cy)
        rows.append((name, t_py, t_cy))
    return rows, len(edge_vals), len(tri_vals)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="50,100,200",
                    help="comma-separated cloud sizes (default 50,100,200)")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"{'n':>5} {'kernel':<14} {'python':>12} {'cython':>12} {'speedup':>8}")
    for n in (int(s) for s in args.sizes.split(",")):
        rows, n_edges, n_tris = bench(n, args.repeats, rng)
        for name, t_py, t_cy in rows:
            ratio = t_py / t_cy if t_cy > 0 else float("inf")
            print(f"{n:>5} {name:<14} {t_py * 1e3:>10.3f}ms {t_cy * 1e3:>10.3f}ms "
                  f"{ratio:>7.1f}x")
        print(f"      ({n_edges} edges, {n_tris} triangles at scale 6.0)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
