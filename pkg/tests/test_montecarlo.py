"""Seeded trial runner and interval helpers."""

import math
import os

import numpy as np

from noisycommit.montecarlo import rng_for, run_trials, thread_budget, wilson_interval


def test_rng_for_deterministic_and_distinct():
    a = rng_for(7, 0).random(4)
    b = rng_for(7, 0).random(4)
    c = rng_for(7, 1).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_run_trials_order_and_determinism():
    def one(i, rng):
        return i, float(rng.random())

    out1 = run_trials(one, 20, master_seed=3)
    out2 = run_trials(one, 20, master_seed=3)
    assert [r[0] for r in out1] == list(range(20))
    assert out1 == out2


def test_thread_env_does_not_change_results(monkeypatch):
    def one(i, rng):
        return float(rng.random())

    monkeypatch.delenv("NOISY_COMMIT_THREADS", raising=False)
    serial = run_trials(one, 30, master_seed=9)
    monkeypatch.setenv("NOISY_COMMIT_THREADS", "4")
    assert thread_budget() == 4
    threaded = run_trials(one, 30, master_seed=9)
    assert serial == threaded
    monkeypatch.setenv("NOISY_COMMIT_THREADS", "1")
    assert thread_budget() == 1


def test_wilson_interval_matches_closed_form():
    z = 1.959963984540054
    for k, n in ((0, 200), (50, 100), (199, 200)):
        lo, hi = wilson_interval(k, n)
        p = k / n
        center = (p + z * z / (2 * n)) / (1 + z * z / n)
        half = (z / (1 + z * z / n)) * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
        assert lo == center - half
        assert hi == center + half
        assert 0.0 <= lo <= p <= hi <= 1.0


def test_wilson_interval_zero_successes():
    lo, hi = wilson_interval(0, 50)
    assert lo == 0.0
    assert hi > 0.0
