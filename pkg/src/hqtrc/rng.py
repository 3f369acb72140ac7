"""Named, seedable random streams on top of numpy's counter-based Philox."""

from __future__ import annotations

import hashlib

import numpy as np


def _name_key(name: str) -> int:
    return int.from_bytes(hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest(), "little")


class Streams:
    """``Streams(seed)("mask")`` returns a fresh generator for the ``mask`` stream.

    The same (seed, name) pair always yields the same sequence; different
    names yield independent Philox keys.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def __call__(self, name: str) -> np.random.Generator:
        ss = np.random.SeedSequence([self.seed, _name_key(name)])
        return np.random.Generator(np.random.Philox(ss))

    def for_run(self, index: int) -> "Streams":
        """Streams of Monte Carlo repetition ``index`` (seed xor index)."""
        return Streams(self.seed ^ int(index))

    def __repr__(self):
        return f"Streams({self.seed})"
