"""Deterministic seed derivation for batch jobs.

Per-sample seeds are a SplitMix-style 64-bit hash of (base seed, sample
id), so batches are reproducible and independent of processing order.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One SplitMix64 mixing step; a strong 64-bit finalizer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, sample_id: str) -> int:
    """64-bit per-sample seed from a base seed and a stable string id."""
    h = splitmix64(base_seed & _MASK64)
    for byte in sample_id.encode("utf-8"):
        h = splitmix64(h ^ byte)
    return h
