"""Per-frame random streams derived from (base seed, policy, point, iteration).

Each Monte-Carlo frame owns an independent counter-based generator keyed by its
coordinates, so results cannot depend on execution order, chunking, or worker
count. This is a correctness requirement for reproducible sweeps, not an
optimization.
"""

from __future__ import annotations

import numpy as np

DEFAULT_BASE_SEED = 42
SEED_ENV_VAR = "BEAMALIGN_SEED"


def frame_seed_sequence(
    base_seed: int, policy_index: int, point_index: int, iteration_index: int
) -> np.random.SeedSequence:
    """Seed material for one frame, independent of every other frame."""
    return np.random.SeedSequence(
        entropy=[base_seed, policy_index, point_index, iteration_index]
    )


def frame_generator(
    base_seed: int, policy_index: int, point_index: int, iteration_index: int
) -> np.random.Generator:
    """Counter-based generator for one frame."""
    return np.random.Generator(
        np.random.Philox(
            frame_seed_sequence(base_seed, policy_index, point_index, iteration_index)
        )
    )
