"""Node-parallel evaluation.

Work is cut into fixed-size chunks whatever the thread count, and chunk
results are concatenated in order, so every downstream reduction sees the
same array bit for bit.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

THREADS_ENV = "VELLING_LAB_THREADS"
CHUNK = 2048


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def parallel_map_nodes(func, z: np.ndarray, chunk: int = CHUNK) -> np.ndarray:
    """Apply a vectorized ``func`` to ``z`` chunkwise; output rows follow ``z``."""
    z = np.asarray(z)
    if z.shape[0] <= chunk:
        return np.asarray(func(z))
    pieces = [z[i : i + chunk] for i in range(0, z.shape[0], chunk)]
    workers = thread_count()
    if workers == 1:
        out = [np.asarray(func(p)) for p in pieces]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(lambda p: np.asarray(func(p)), pieces))
    return np.concatenate(out, axis=0)
