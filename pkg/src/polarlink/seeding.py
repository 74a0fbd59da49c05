"""Deterministic seeding: one 64-bit master seed, splitmix64-derived sub-seeds.

The sub-seed rule is part of the reproducibility contract: worker count and
batching must never change a simulation's random stream, so every frame /
trial / worker derives its own generator as

    sub_seed = splitmix64(seed XOR splitmix64(index))

and feeds it to a counter-based Philox generator.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x):
    """splitmix64 finalizer; uniform 64-bit mixing of an integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_seed(seed, index):
    """Independent sub-seed for a worker/frame/trial index."""
    return splitmix64((seed & _MASK64) ^ splitmix64(index & _MASK64))


def make_rng(seed):
    """Counter-based generator; identical seed gives an identical stream."""
    return np.random.Generator(np.random.Philox(seed & _MASK64))
