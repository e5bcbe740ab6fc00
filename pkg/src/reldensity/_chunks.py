"""Range splitting and ordered parallel reduction.

Chunk boundaries never depend on the thread count, so every reduction
sees the same pieces in the same order regardless of parallelism.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")

CHUNK = 1 << 18


def default_threads() -> int:
    return int(os.environ.get("RELDENSITY_THREADS", "1"))


def split_range(lo: int, hi: int, chunk: int = CHUNK,
                cuts: Iterable[int] = ()) -> list[tuple[int, int]]:
    """Split the half-open range [lo, hi) into pieces of at most `chunk`
    integers, additionally cutting at every point of `cuts`."""
    bounds = sorted({lo, hi, *(c for c in cuts if lo < c < hi)})
    pieces = []
    for a, b in zip(bounds, bounds[1:]):
        for s in range(a, b, chunk):
            pieces.append((s, min(s + chunk, b)))
    return pieces


def ordered_map(fn: Callable[[int, int], T], pieces: Sequence[tuple[int, int]],
                threads: int | None = None) -> list[T]:
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(pieces) <= 1:
        return [fn(a, b) for a, b in pieces]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda p: fn(*p), pieces))


def geometric_points(n_max: int, count: int, start: int = 1) -> list[int]:
    """Roughly geometric integers in [start, n_max], always ending at n_max."""
    import numpy as np

    if count < 2:
        raise ValueError("need at least two checkpoints")
    pts = np.unique(np.rint(np.geomspace(start, n_max, count)).astype(np.int64))
    out = [int(p) for p in pts if start <= p <= n_max]
    if out[-1] != n_max:
        out.append(n_max)
    return out
