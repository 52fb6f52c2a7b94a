"""Counter-based random substreams for reproducible parallel simulation.

Every household gets its own family of Philox streams keyed by
(master_seed, household_index), so results do not depend on execution
order or worker count. Streams within a household are separated through
the high word of the 256-bit Philox counter and can never overlap.
"""

from __future__ import annotations

import numpy as np

# Stream ids within one household. Keep stable: changing them changes results.
STREAM_LIFESPAN = 0
STREAM_INCOME_HEAD = 1
STREAM_INCOME_SPOUSE = 2
STREAM_PATH = 3


def household_stream(master_seed: int, household_index: int, stream_id: int) -> np.random.Generator:
    """Return the generator for one (household, stream) pair."""
    key = np.array([master_seed, household_index], dtype=np.uint64)
    counter = np.array([0, 0, 0, stream_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))
