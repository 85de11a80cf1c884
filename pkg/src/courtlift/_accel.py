"""Numba acceleration shim.

Hot kernels in :mod:`courtlift._kernels` are decorated with :func:`njit`.
By default they are JIT-compiled with numba; setting the environment
variable ``COURTLIFT_NUMBA=0`` (or numba being unavailable) selects the
pure-numpy fallback, where the same functions run as plain Python.

``benchmarks/bench_reconstruct.py`` compares both paths.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

_FALSEY = {"0", "false", "off", "no"}


def _numba_requested() -> bool:
    return os.environ.get("COURTLIFT_NUMBA", "1").strip().lower() not in _FALSEY


NUMBA_ENABLED = False
if _numba_requested():
    try:
        from numba import njit as _numba_njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

if NUMBA_ENABLED:

    def njit(*args, **kwargs):
        return _numba_njit(*args, **kwargs)

else:

    def njit(*args, **kwargs):
        """No-op decorator standing in for numba.njit."""
        if args and callable(args[0]):
            return args[0]

        def decorate(func):
            return func

        return decorate


def run_chunked(kernel, n: int, threads: int, *args) -> None:
    """Run ``kernel(*args, start, stop)`` over [0, n) split into contiguous chunks.

    Chunking only affects scheduling: each index writes its own output slots,
    so results are identical for any thread count. Kernels are compiled with
    ``nogil=True`` so chunks genuinely overlap when numba is enabled.
    """
    if n <= 0:
        return
    t = max(1, min(int(threads), n))
    if t == 1:
        kernel(*args, 0, n)
        return
    bounds = np.linspace(0, n, t + 1).astype(np.int64)
    with ThreadPoolExecutor(max_workers=t) as pool:
        futures = [
            pool.submit(kernel, *args, int(bounds[i]), int(bounds[i + 1]))
            for i in range(t)
            if bounds[i] < bounds[i + 1]
        ]
        for fut in futures:
            fut.result()
