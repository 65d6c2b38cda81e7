"""Seed handling shared by every stochastic routine in the package.

All randomness goes through numpy's ``PCG64`` bit generator, seeded through
``numpy.random.SeedSequence``.  Both are specified bit-for-bit by numpy and
produce the same streams on every platform, so a seed fully determines a
result.  Independent sub-streams (one per sweep cell and trial, one per
sampled submatrix, ...) are obtained by passing a tuple of integers as the
entropy of a ``SeedSequence``; its hashing mixes the words into a 128-bit
pool, so ``(base, i, j, t)`` tuples never collide in practice.
"""
import numpy as np

SEED_MASK = (1 << 64) - 1


def as_words(*keys):
    """Map integer keys (possibly negative, possibly nested tuples) to
    unsigned 64-bit words."""
    words = []
    for k in keys:
        if isinstance(k, (tuple, list)):
            words.extend(as_words(*k))
        else:
            words.append(int(k) & SEED_MASK)
    return words


def make_rng(*keys):
    """Return a ``numpy.random.Generator`` for the stream named by ``keys``."""
    words = as_words(*keys)
    if not words:
        raise ValueError("at least one seed key is required")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))


def derive_seed(*keys):
    """Collapse a tuple of keys into a single 64-bit integer seed."""
    state = np.random.SeedSequence(as_words(*keys)).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def sample_without_replacement(rng, n, m):
    """Draw ``m`` distinct integers from ``range(n)`` in draw order.

    Partial Fisher-Yates shuffle: only the first ``m`` swaps are made, so the
    cost is O(n) memory and O(m) random draws.
    """
    if not 0 <= m <= n:
        raise ValueError(f"cannot draw {m} distinct items from {n}")
    pool = np.arange(n)
    # one draw per position, uniform on [i, n)
    picks = rng.integers(np.arange(m), n)
    for i, j in enumerate(picks):
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:m].copy()
