"""Counter-based seed derivation.

Every random draw in an evolution run is made by a ``random.Random``
instance whose seed is derived from the master seed plus a label and
counters. No RNG state is ever threaded between stages, so any stage
(an episode, a round of reproduction) can be recomputed in isolation
and runs are reproducible regardless of evaluation order.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(*parts) -> int:
    """Map a tuple of labels/counters to a 64-bit seed."""
    key = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(*parts) -> random.Random:
    return random.Random(derive_seed(*parts))
