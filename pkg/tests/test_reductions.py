import math

import numpy as np
import pytest

from mhdq.reductions import BLOCK, THREADS_ENV, SlabPool, pairwise_sum, worker_count_from_env


def test_pairwise_sum_small_cases():
    assert pairwise_sum(np.array([])) == 0.0
    assert pairwise_sum(np.array([2.5])) == 2.5
    assert pairwise_sum(np.arange(10.0)) == 45.0


def test_pairwise_sum_is_accurate():
    values = np.random.default_rng(0).normal(size=100_003)
    assert pairwise_sum(values) == pytest.approx(math.fsum(values), abs=1e-10)


def test_pairwise_sum_depends_only_on_values():
    values = np.random.default_rng(1).normal(size=(7, 11, 13))
    assert pairwise_sum(values) == pairwise_sum(values.copy(order="F").ravel(order="C"))


@pytest.mark.parametrize("workers", [2, 3, 4, 8])
def test_parallel_sum_is_bitwise_identical(workers):
    values = np.random.default_rng(2).normal(size=5 * BLOCK + 17) * 1e3
    serial = pairwise_sum(values)
    with SlabPool(workers) as pool:
        assert pool.parallel
        assert pool.pairwise_sum(values) == serial


def test_serial_pool():
    pool = SlabPool(0)
    assert not pool.parallel
    assert pool.slab_ranges(10) == [(0, 10)]
    assert pool.map(lambda x: x * 2, [1, 2, 3]) == [2, 4, 6]
    pool.close()


def test_slab_ranges_cover_x1_without_overlap():
    with SlabPool(4) as pool:
        ranges = pool.slab_ranges(10)
        assert len(ranges) == 4
        assert ranges[0][0] == 0 and ranges[-1][1] == 10
        assert all(a[1] == b[0] for a, b in zip(ranges, ranges[1:]))
        assert len(pool.slab_ranges(2)) == 2


def test_map_preserves_order():
    with SlabPool(3) as pool:
        assert pool.map(lambda r: r[0], pool.slab_ranges(9)) == [0, 3, 6]


def test_worker_count_from_env(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert worker_count_from_env(default=1) == 1
    monkeypatch.setenv(THREADS_ENV, "4")
    assert worker_count_from_env() == 4
    monkeypatch.setenv(THREADS_ENV, "-3")
    assert worker_count_from_env() == 0
    monkeypatch.setenv(THREADS_ENV, "many")
    assert worker_count_from_env(default=2) == 2
