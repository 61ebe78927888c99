"""Per-stage seed derivation.

Every random stage of an experiment draws from
``SeedSequence([master_seed, H(stage)])`` where H(stage) is the first
eight bytes of the SHA-256 digest of the stage name, read little-endian.
Stages are therefore independent of each other and of execution order.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stage_key(stage: str) -> int:
    """64-bit integer key of a stage name."""
    digest = hashlib.sha256(stage.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def stage_seed(master_seed: int, stage: str) -> np.random.SeedSequence:
    """
    Seed sequence of one stage.

    Examples
    --------
    >>> a = stage_seed(7, "train").generate_state(1)
    >>> b = stage_seed(7, "train").generate_state(1)
    >>> bool((a == b).all())
    True
    """
    return np.random.SeedSequence([int(master_seed), stage_key(stage)])


def stage_rng(master_seed: int, stage: str) -> np.random.Generator:
    """Generator of one stage."""
    return np.random.default_rng(stage_seed(master_seed, stage))


def stage_int(master_seed: int, stage: str) -> int:
    """31-bit integer seed of one stage, for APIs that take plain ints."""
    return int(stage_seed(master_seed, stage).generate_state(1)[0] & 0x7FFFFFFF)
