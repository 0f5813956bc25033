"""Deterministic random-stream derivation.

Every stochastic stage of the pipeline (scene, training satellites, each
test satellite set, each GA population) draws from its own generator,
derived from one master seed plus a role tag.  Streams are therefore
independent and reproducible regardless of evaluation order.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master_seed: int, role: str) -> int:
    """Hash (master_seed, role) into a stable 64-bit stream seed."""
    digest = hashlib.sha256(f"{master_seed}:{role}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def rng_for(master_seed: int, role: str) -> np.random.Generator:
    """Generator for the stream identified by ``role`` under a master seed."""
    return np.random.default_rng(derive_seed(master_seed, role))
