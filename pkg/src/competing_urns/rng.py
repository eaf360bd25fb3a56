"""Keyed random streams.

Each stream is a PCG64 generator seeded from ``SeedSequence(master_seed,
spawn_key=(replica, role))``. Engines draw ball/edge selections and
holding times from different roles, so the jump chain can be replayed with
an unrelated clock stream and vice versa.
"""

from __future__ import annotations

import os

import numpy as np

ALGORITHM = "PCG64/SeedSequence(master_seed, spawn_key=(replica, role))"

SELECT = 0
CLOCK = 1
MONITOR = 2
AUX = 3

SEED_ENV = "COMPETING_URNS_SEED"


def stream(master_seed: int, replica: int = 0, role: int = SELECT) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed) & 0xFFFFFFFFFFFFFFFF,
                                spawn_key=(int(replica), int(role)))
    return np.random.Generator(np.random.PCG64(ss))


def streams(master_seed: int, replica: int = 0) -> tuple[np.random.Generator, np.random.Generator]:
    """Selection and clock streams for one replica."""
    return stream(master_seed, replica, SELECT), stream(master_seed, replica, CLOCK)


def resolve_seed(seed: int | None) -> int:
    """``COMPETING_URNS_SEED`` in the environment overrides ``seed``."""
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        return int(env, 0)
    if seed is None:
        raise ValueError("no master seed given")
    return int(seed)
