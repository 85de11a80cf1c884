#!/usr/bin/env python3
"""Benchmark the batch height reconstruction: numba JIT vs pure numpy.

The two paths share one kernel source; COURTLIFT_NUMBA=0 selects the
pure-Python/numpy fallback at import time. When numba is active this
script re-runs itself in a COURTLIFT_NUMBA=0 subprocess to time the pure
path and verifies both paths produce identical reconstructions.

Usage:
  python benchmarks/bench_reconstruct.py [--n 50000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from courtlift import ArenaSpec, generate_dataset
from courtlift._accel import NUMBA_ENABLED
from courtlift import _kernels as _k
from courtlift.reconstruct import pack_calibrations


def _prepare(n: int):
    samples = generate_dataset(seed=77, n=n, arena=ArenaSpec(), n_arenas=10)
    cals = pack_calibrations([s.cal for s in samples[:10]])
    idx = np.array([s.arena_id for s in samples], dtype=np.int64)
    px = np.array([[s.ball_px.x, s.ball_px.y] for s in samples])
    h = np.array([s.h_true for s in samples])
    return cals, idx, px, h


def run_batch(n: int, repeat: int):
    """Time the batch kernel in the currently active mode."""
    cals, idx, px, h = _prepare(n)
    outs = (
        np.empty((n, 3)),
        np.empty((n, 2)),
        np.empty((n, 2)),
        np.empty(n),
        np.empty(n),
        np.empty(n, dtype=np.int64),
    )
    _k.reconstruct_height_batch(cals, idx, px, h, *outs, 0, min(n, 64))  # JIT warmup
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        _k.reconstruct_height_batch(cals, idx, px, h, *outs, 0, n)
        best = min(best, time.perf_counter() - t0)
    return best, outs[0], outs[5]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=50_000, help="samples to reconstruct")
    parser.add_argument("--repeat", type=int, default=3, help="timing repetitions")
    parser.add_argument("--dump", default=None, help=argparse.SUPPRESS)
    args = parser.parse_args()

    mode = "numba jit" if NUMBA_ENABLED else "pure numpy"
    elapsed, ball, status = run_batch(args.n, args.repeat)
    print(f"{mode:10s}: {elapsed:.4f} s  ({args.n / elapsed / 1e6:.3f} M samples/s)")

    if args.dump:
        np.savez(args.dump, ball=ball, status=status, elapsed=elapsed)
        return

    if not NUMBA_ENABLED:
        return

    # Re-run in a pure-numpy subprocess for the fallback timing.
    dump = os.path.join(os.path.dirname(os.path.abspath(__file__)), ".pure_dump.npz")
    env = dict(os.environ, COURTLIFT_NUMBA="0")
    subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--n", str(args.n), "--repeat",
         str(max(1, args.repeat - 2)), "--dump", dump],
        env=env,
        check=True,
    )
    pure = np.load(dump)
    os.remove(dump)
    np.testing.assert_array_equal(pure["status"], status)
    np.testing.assert_allclose(pure["ball"], ball, rtol=1e-12, atol=1e-12)
    t_pure = float(pure["elapsed"])
    print(
        f"paths agree (max |delta| = {np.abs(pure['ball'] - ball).max():.2e} m), "
        f"speedup x{t_pure / elapsed:.0f}"
    )


if __name__ == "__main__":
    main()
