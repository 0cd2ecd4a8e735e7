"""
Per-trajectory random streams

Every trajectory owns a Philox counter-based stream keyed by
(seed, epsilon index, trajectory index), so results do not depend on how
trajectories are grouped into shards or spread over workers.
"""

import numpy as np


def trajectory_stream(seed: int, eps_index: int, trajectory_index: int) -> np.random.Generator:
    """Independent generator for one trajectory."""
    key = np.random.SeedSequence([seed, eps_index, trajectory_index])
    return np.random.Generator(np.random.Philox(key))
