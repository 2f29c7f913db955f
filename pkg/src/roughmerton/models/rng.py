"""Reproducible random streams and block-parallel execution.

Paths are grouped into fixed blocks of ``BLOCK_SIZE``. Block ``b`` draws from
``PCG64(SeedSequence(seed, spawn_key=(b,)))``, so every path is a function of
(seed, block layout) only and the thread count merely changes scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np
from threadpoolctl import threadpool_limits

from ..errors import DomainError

BLOCK_SIZE = 1024
MAX_SEED = 2 ** 64 - 1
T = TypeVar("T")


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= int(seed) <= MAX_SEED:
        raise DomainError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


def check_paths(n_paths: int) -> int:
    if isinstance(n_paths, bool) or int(n_paths) != n_paths or n_paths < 1:
        raise DomainError(f"n_paths must be a positive integer, got {n_paths!r}")
    return int(n_paths)


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def blocks(n_paths: int) -> list[tuple[int, int, int]]:
    """(block index, first path, block length)."""
    count = math.ceil(n_paths / BLOCK_SIZE)
    return [(b, b * BLOCK_SIZE, min(BLOCK_SIZE, n_paths - b * BLOCK_SIZE)) for b in range(count)]


def default_threads() -> int:
    raw = os.environ.get("ROUGHMERTON_THREADS", "1")
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(f"ROUGHMERTON_THREADS must be an integer, got {raw!r}") from exc
    return max(1, value)


def run_blocks(worker: Callable[[int, int], T], n_paths: int, threads: int | None = None) -> list[T]:
    """Call ``worker(block, length)`` for every block, results in block order.

    BLAS is pinned to one thread so a block's arithmetic never depends on
    how many workers run beside it.
    """
    layout = blocks(n_paths)
    threads = default_threads() if threads is None else int(threads)
    if threads < 1:
        raise DomainError("threads must be at least 1")
    with threadpool_limits(limits=1, user_api="blas"):
        if threads == 1 or len(layout) == 1:
            return [worker(b, m) for b, _, m in layout]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda item: worker(item[0], item[2]), layout))


def normals(rng: np.random.Generator, m: int, n: int, antithetic: bool) -> np.ndarray:
    """Standard normals of shape (m, n); with antithetics row k+m/2 mirrors row k."""
    if not antithetic:
        return rng.standard_normal((m, n))
    half = rng.standard_normal((m // 2, n))
    return np.concatenate([half, -half], axis=0)


def pair_average(values: np.ndarray, antithetic: bool) -> np.ndarray:
    """Collapse antithetic pairs into single i.i.d. samples (identity otherwise)."""
    values = np.asarray(values, dtype=float)
    if not antithetic:
        return values
    out = []
    for _, start, m in blocks(values.shape[0]):
        half = m // 2
        chunk = values[start:start + m]
        out.append(0.5 * (chunk[:half] + chunk[half:]))
    return np.concatenate(out)


def mean_and_se(values: np.ndarray, antithetic: bool = False) -> tuple[float, float]:
    """Sample mean (exactly rounded sum) and its standard error."""
    samples = pair_average(values, antithetic)
    n = samples.shape[0]
    mean = math.fsum(samples.tolist()) / n
    if n < 2 or np.ptp(samples) == 0.0:
        return mean, 0.0
    dev = samples - mean
    var = math.fsum((dev * dev).tolist()) / (n - 1)
    return mean, math.sqrt(var / n)
