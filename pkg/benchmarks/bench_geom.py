"""Benchmark the geometry kernels: compiled extension vs numpy fallback.

Runs the full per-object frame pass (project -> depth test -> splat -> close)
over synthetic workloads sized like real scan processing and reports
per-kernel timings. The two backends must also agree bit-for-bit; this
script asserts that while it measures.

Usage: python benchmarks/bench_geom.py [--points 200000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from scanforge.geom.backend import available_backends


def make_workload(n_points, width=640, height=480, seed=0):
    rng = np.random.default_rng(seed)
    points = rng.uniform([-3, -3, 0.2], [3, 3, 6.0], size=(n_points, 3))
    pose = np.eye(4)
    pose[:3, 3] = (0.3, -0.2, -1.0)
    w2c = np.linalg.inv(pose)
    depth = rng.integers(0, 6000, size=(height, width)).astype(np.uint16)
    intr = dict(fx=580.0, fy=577.0, cx=width / 2, cy=height / 2, width=width, height=height)
    return points, w2c, depth, intr


def run_backend(kernels, points, w2c, depth, intr, splat_radius=2, close_kernel=5):
    timings = {}
    t0 = time.perf_counter()
    u, v, z, status = kernels.project(
        points, w2c, intr["fx"], intr["fy"], intr["cx"], intr["cy"],
        intr["width"], intr["height"],
    )
    timings["project"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    status = kernels.depth_test(u, v, z, status, depth, 0.05)
    timings["depth_test"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    mask = kernels.splat(u, v, status, splat_radius, intr["height"], intr["width"])
    timings["splat"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    closed = kernels.close(mask, close_kernel)
    timings["close"] = time.perf_counter() - t0
    return timings, (u, v, z, status, mask, closed)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; benchmarking numpy fallback only")
    workload = make_workload(args.points)

    results = {}
    outputs = {}
    for name, kernels in backends.items():
        best = {}
        for _ in range(args.repeats):
            timings, out = run_backend(kernels, *workload)
            for op, dt in timings.items():
                best[op] = min(best.get(op, float("inf")), dt)
        results[name] = best
        outputs[name] = out

    if len(outputs) == 2:
        for a, b in zip(outputs["numpy"], outputs["compiled"]):
            assert np.array_equal(a, b), "backend outputs diverge"
        print(f"outputs bit-identical across backends ({args.points} points)\n")

    ops = ["project", "depth_test", "splat", "close"]
    header = f"{'kernel':<12}" + "".join(f"{name:>14}" for name in results)
    if len(results) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for op in ops:
        row = f"{op:<12}"
        for name in results:
            row += f"{results[name][op] * 1e3:>12.2f}ms"
        if len(results) == 2:
            row += f"{results['numpy'][op] / results['compiled'][op]:>9.1f}x"
        print(row)
    total = {name: sum(r.values()) for name, r in results.items()}
    row = f"{'total':<12}" + "".join(f"{total[name] * 1e3:>12.2f}ms" for name in results)
    if len(results) == 2:
        row += f"{total['numpy'] / total['compiled']:>9.1f}x"
    print(row)


if __name__ == "__main__":
    main()
