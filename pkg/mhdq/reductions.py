"""
Reproducible reductions and the x1-slab worker pool.

``pairwise_sum`` pads to a power of two and adds neighbours level by level,
so the tree shape depends only on the number of values. The block-parallel
variant sums aligned power-of-two blocks first, which are exactly the lower
levels of that same tree: the result is identical for any worker count.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

BLOCK = 4096
THREADS_ENV = "MHDQ_THREADS"

T = TypeVar("T")


def _next_pow2(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


def _tree(buf: np.ndarray) -> float:
    while buf.size > 1:
        buf = buf[0::2] + buf[1::2]
    return float(buf[0])


def pairwise_sum(values: np.ndarray) -> float:
    """Sum with a fixed binary tree over the zero-padded power-of-two buffer"""
    flat = np.asarray(values, dtype=float).ravel()
    buf = np.zeros(_next_pow2(flat.size))
    buf[:flat.size] = flat
    return _tree(buf)


def worker_count_from_env(default: int = 1) -> int:
    """MHDQ_THREADS caps the pool; 0 means serial"""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        count = int(raw)
    except ValueError:
        logger.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
        return default
    return max(0, count)


class SlabPool:
    """Thread pool mapping work over contiguous x1 slabs"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = worker_count_from_env() if workers is None else max(0, int(workers))
        self._executor = ThreadPoolExecutor(self.workers) if self.workers > 1 else None

    @property
    def parallel(self) -> bool:
        return self._executor is not None

    def slab_ranges(self, n1: int) -> List[Tuple[int, int]]:
        parts = max(1, min(self.workers, n1))
        edges = np.linspace(0, n1, parts + 1).round().astype(int)
        return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]

    def map(self, fn: Callable[..., T], items: Sequence) -> List[T]:
        if self._executor is None or len(items) <= 1:
            return [fn(item) for item in items]
        return list(self._executor.map(fn, items))

    def pairwise_sum(self, values: np.ndarray) -> float:
        """Same value as the module-level pairwise_sum, blocks summed in the pool"""
        flat = np.asarray(values, dtype=float).ravel()
        size = _next_pow2(flat.size)
        if self._executor is None or size <= BLOCK:
            return pairwise_sum(flat)
        buf = np.zeros(size)
        buf[:flat.size] = flat
        blocks = [buf[k:k + BLOCK] for k in range(0, size, BLOCK)]
        partial = np.array(self.map(_tree, blocks))
        return _tree(partial)

    def close(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()
