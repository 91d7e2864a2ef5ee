from __future__ import annotations

import logging
import os
import zlib

import numpy as np

__all__ = ["THREADS_ENV_VAR", "format_float", "make_rng", "thread_count"]

THREADS_ENV_VAR = "SWIRLMHD_THREADS"


def thread_count() -> int:
    """Return the worker cap from ``SWIRLMHD_THREADS`` (default 1, which keeps runs deterministic)."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or not raw.strip():
        return 1
    try:
        value = int(raw)
    except ValueError:
        logging.warning("Ignoring non-integer %s=%r", THREADS_ENV_VAR, raw)
        return 1
    return max(1, value)


def make_rng(seed: int, stream: str = "") -> np.random.Generator:
    """PCG64 generator keyed by ``(seed, stream)``; streams keep suites independent of each other's draws."""
    sequence = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, zlib.crc32(stream.encode("utf-8"))])
    return np.random.Generator(np.random.PCG64(sequence))


def format_float(value: float) -> str:
    """17 significant digits: enough to round-trip every double."""
    return format(float(value), ".17g")
