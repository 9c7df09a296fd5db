"""Seeded Monte Carlo plumbing shared by the protocol harnesses and CLI.

Every trial gets its own generator derived from (master seed, trial
index), so results are independent of execution order and of the worker
count. NOISY_COMMIT_THREADS caps the thread pool; unset or 1 runs
serially.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def rng_for(master_seed, *path) -> np.random.Generator:
    """Generator for a labeled stream under a master seed."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, path)]))


def thread_budget() -> int:
    raw = os.environ.get("NOISY_COMMIT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"NOISY_COMMIT_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ValueError("NOISY_COMMIT_THREADS must be >= 1")
    return n


def run_trials(fn, trials, master_seed):
    """fn(trial_index, rng) for each trial; results in trial order.

    No shared mutable state: fn must derive all randomness from the rng
    it receives.
    """
    indices = range(trials)
    workers = min(thread_budget(), max(trials, 1))
    if workers == 1:
        return [fn(i, rng_for(master_seed, i)) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: fn(i, rng_for(master_seed, i)), indices))


def wilson_interval(successes, trials, z=1.959963984540054):
    """Wilson score interval for a binomial proportion, default 95%."""
    if trials == 0:
        return (0.0, 1.0)
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return (max(0.0, center - half), min(1.0, center + half))
