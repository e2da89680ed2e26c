"""Deterministic stream derivation for parallel Monte Carlo.

All randomness in this package comes from counter-based Philox generators
keyed by (master_seed, stream_index). Stream k of seed s is always the
same sequence, independent of how many workers consume streams or in what
order, which is what makes ensemble results reproducible across thread
counts.
"""

import numpy as np

MAX_SEED = 2**64 - 1


def stream(master_seed, index=0):
    """Return the Philox generator for stream `index` of `master_seed`."""
    if not 0 <= int(master_seed) <= MAX_SEED:
        raise ValueError(f"master_seed must be in [0, 2**64): got {master_seed}")
    if not 0 <= int(index) <= MAX_SEED:
        raise ValueError(f"stream index must be in [0, 2**64): got {index}")
    key = (int(master_seed) << 64) + int(index)
    return np.random.Generator(np.random.Philox(key=key))
