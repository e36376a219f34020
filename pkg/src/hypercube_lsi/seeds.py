"""Reproducible per-trial seeds and a bounded parallel map.

Trial seeds come from a root seed by SplitMix64: the key path is folded into
the state one word at a time, so ``derive(root, n, trial)`` depends only on
its arguments and never on scheduling.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

DEFAULT_SEED = 20140101
MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns (next state, output)."""
    state = (state + GOLDEN) & MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return state, z ^ (z >> 31)


def derive(root: int, *keys: int) -> int:
    state = int(root) & MASK
    state, out = splitmix64(state)
    for k in keys:
        state, out = splitmix64(state ^ (int(k) & MASK))
    return out


def rng_for(root: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(derive(root, *keys))


def thread_cap() -> int:
    raw = os.environ.get("HYPERCUBE_LSI_THREADS", "")
    try:
        cap = int(raw)
    except ValueError:
        cap = os.cpu_count() or 1
    return max(1, cap)


def ordered_map(fn, items, threads: int | None = None) -> list:
    """map() that may run on a thread pool; results always come back in input order."""
    items = list(items)
    threads = thread_cap() if threads is None else max(1, threads)
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
