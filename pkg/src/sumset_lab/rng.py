"""Counter-based random streams keyed by (seed, index)."""
from __future__ import annotations

import numpy as np


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    """Independent Philox stream for instance ``index`` of campaign ``seed``.

    Streams depend only on the key, never on evaluation order, so a campaign
    replays identically under any worker count.
    """
    if seed is None:
        raise ValueError("a seed is required")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


def sample_subset(rng: np.random.Generator, universe, k: int) -> list[int]:
    pool = list(universe)
    picks = rng.choice(len(pool), size=k, replace=False)
    return sorted(pool[i] for i in picks)
