"""Time the compiled kernels against their pure-Python twins.

Usage: python3 benchmarks/bench_kernels.py [--points N] [--repeats K]

Both backends must produce identical arrays; the benchmark asserts that
before reporting speedups.
"""

import argparse
import time

import numpy as np

from topomargin import _core_py
from topomargin._rng import SplitMix64
from topomargin.embed import EmbeddingConfig, _noise_cdf, generate_walks
from topomargin.ingest import ContactGraph, PointCloud
from topomargin.persistence import _boundary_csr, rips_filtration

try:
    from topomargin import _core
except ImportError:
    _core = None


def timed(fn, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def bench_reduction(n_points, repeats):
    rng = SplitMix64(1)
    cloud = PointCloud(
        coords=np.array(
            [[rng.next_double() for _ in range(3)] for _ in range(n_points)]
        ),
        id="bench",
    )
    f = rips_filtration(cloud, max_dim=3)
    offsets, rows, dims, _ = _boundary_csr(f)
    print(f"boundary reduction: {len(dims)} simplices from {n_points} points")

    py_out, py_t = timed(lambda: _core_py.reduce_boundary(offsets, rows, dims, 3), repeats)
    print(f"  python : {py_t * 1000:8.1f} ms")
    if _core is not None:
        cy_out, cy_t = timed(lambda: _core.reduce_boundary(offsets, rows, dims, 3), repeats)
        assert np.array_equal(py_out, cy_out), "backends disagree"
        print(f"  cython : {cy_t * 1000:8.1f} ms   ({py_t / cy_t:.1f}x)")


def bench_sgns(n_nodes, repeats):
    edges = [(i, (i + 1) % n_nodes) for i in range(n_nodes)]
    edges += [(i, (i + 7) % n_nodes) for i in range(0, n_nodes, 3)]
    g = ContactGraph(n_nodes=n_nodes, edges=sorted(set(
        (min(u, v), max(u, v)) for u, v in edges if u != v
    )), threshold=1.0)
    cfg = EmbeddingConfig(dim=16, walks_per_node=10, walk_length=40, seed=3)
    corpus = generate_walks(g, cfg)
    flat, offsets = corpus.flatten()
    cdf = _noise_cdf(flat, g.n_nodes)
    args = (flat, offsets, g.n_nodes, cfg.dim, cfg.window, cfg.negatives,
            cfg.epochs, 0.025, 1e-4, cdf, 99)
    print(f"sgns training: {len(corpus.walks)} walks over {n_nodes} nodes")

    py_out, py_t = timed(lambda: _core_py.sgns_train(*args), repeats)
    print(f"  python : {py_t * 1000:8.1f} ms")
    if _core is not None:
        cy_out, cy_t = timed(lambda: _core.sgns_train(*args), repeats)
        assert np.array_equal(py_out, cy_out), "backends disagree"
        print(f"  cython : {cy_t * 1000:8.1f} ms   ({py_t / cy_t:.1f}x)")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=40,
                    help="cloud size for the reduction benchmark")
    ap.add_argument("--nodes", type=int, default=60,
                    help="graph size for the sgns benchmark")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    if _core is None:
        print("compiled core not available; timing the fallback only")
    bench_reduction(args.points, args.repeats)
    bench_sgns(args.nodes, args.repeats)


if __name__ == "__main__":
    main()
