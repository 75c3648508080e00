"""Seeded random-number streams.

All stochastic code in the toolkit draws from a counter-based Philox
generator keyed by an explicit integer tuple.  Distinct key tuples give
independent streams, so replicate ``r`` of a study seeded with ``s`` can use
``make_rng(s, r)`` without coordinating with any other replicate.  There is
no module-level generator and no global state anywhere.
"""

from __future__ import annotations

import numpy as np


def make_rng(*key: int) -> np.random.Generator:
    """Return a Philox generator for the given integer key tuple.

    The tuple is prefixed with its own length before seeding: SeedSequence
    ignores trailing zero entropy words, so without the prefix ``(s,)`` and
    ``(s, 0)`` would collide on one stream.
    """
    if not key:
        raise ValueError("make_rng requires at least one integer key component")
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence((len(key),) + key))
    )
