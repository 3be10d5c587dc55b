"""Seeded, optionally parallel trial execution.

Each trial gets its own generator derived from (seed, trial index), so results
are independent of execution order and of the number of workers.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def run_seeded_trials(fn, trials: int, seed: int, parallel: int = 1) -> list:
    """Run ``fn(trial_index, rng)`` for each trial; results in index order."""
    def one(t: int):
        return fn(t, trial_rng(seed, t))

    if parallel <= 1:
        return [one(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(one, range(trials)))
