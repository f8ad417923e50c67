"""Timing comparison of the two kernel lanes.

Runs each hot kernel (batched characteristic values, values+derivatives,
and determinant-polynomial interpolation) under both lanes and prints a
table.  Lanes are chosen at import time from HIERDDE_BACKEND, so each lane
runs in its own subprocess.

Usage: python3 benchmarks/bench_backends.py [--points N] [--repeats R]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _workloads(points):
    import numpy as np

    rng = np.random.default_rng(20240817)
    d, n = 2, 2
    mats = (rng.standard_normal((n + 1, d, d))
            + 1j * rng.standard_normal((n + 1, d, d)))
    taus = np.array([10.0, 100.0])
    lams = (0.02 * rng.standard_normal(points)
            + 1j * rng.uniform(-3.0, 3.0, points))
    m = 3
    B = (rng.standard_normal((points // 4, m, m))
         + 1j * rng.standard_normal((points // 4, m, m)))
    Ak = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    radii = rng.uniform(0.5, 2.0, points // 4)
    return mats, taus, lams, B, Ak, radii


def worker(points, repeats):
    from hierdde import _backend

    mats, taus, lams, B, Ak, radii = _workloads(points)
    jobs = {
        "char_values": lambda: _backend.char_values(lams, mats, taus),
        "char_and_deriv": lambda: _backend.char_and_deriv(lams, mats, taus),
        "det_poly_coeffs": lambda: _backend.det_poly_coeffs(B, Ak, radii),
    }
    out = {"backend": _backend.backend_name(), "timings": {}}
    for name, job in jobs.items():
        job()  # warm-up (includes any jit compilation)
        best = min(_timed(job) for _ in range(repeats))
        out["timings"][name] = best
    print(json.dumps(out))


def _timed(job):
    t0 = time.perf_counter()
    job()
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        worker(args.points, args.repeats)
        return

    results = {}
    for lane in ("numpy", "numba"):
        env = dict(os.environ, HIERDDE_BACKEND=lane)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--worker",
             "--points", str(args.points), "--repeats", str(args.repeats)],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"{lane}: skipped ({proc.stderr.strip().splitlines()[-1]})")
            continue
        data = json.loads(proc.stdout.strip().splitlines()[-1])
        results[lane] = data["timings"]

    if not results:
        sys.exit("no lane produced timings")
    names = sorted(next(iter(results.values())))
    width = max(len(n) for n in names)
    header = f"{'kernel':<{width}}" + "".join(f"  {lane:>12}"
                                              for lane in results)
    if len(results) == 2:
        header += f"  {'speedup':>9}"
    print(f"batch size {args.points}, best of {args.repeats}")
    print(header)
    for name in names:
        row = f"{name:<{width}}"
        for lane in results:
            row += f"  {results[lane][name] * 1e3:>10.2f}ms"
        if len(results) == 2:
            a, b = (results[lane][name] for lane in results)
            row += f"  {a / b:>8.2f}x"
        print(row)


if __name__ == "__main__":
    main()
