"""Keyed random streams.

Every random draw in the package goes through :func:`stream`, which builds a
numpy ``Generator`` on the Philox-4x64 counter-based bit generator. The
128-bit Philox key is a BLAKE2b digest of the master seed plus a tuple of
context values (for example ``(p, q, "secret")``), so each experiment owns
an independent stream and results do not depend on iteration order.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_key(seed: int, *context) -> int:
    material = repr((int(seed),) + tuple(context)).encode()
    return int.from_bytes(hashlib.blake2b(material, digest_size=16).digest(), "little")


def stream(seed: int, *context) -> np.random.Generator:
    """Return a Philox generator keyed by ``(seed, *context)``."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *context)))
