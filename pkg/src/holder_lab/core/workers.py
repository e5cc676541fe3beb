# src/holder_lab/core/workers.py
from __future__ import annotations

import os

__all__ = ["get_worker_count"]


def get_worker_count(
    *,
    env_var: str = "HL_WORKERS",
    cpu_bound: bool = True,
    minimum: int = 1,
    cap: int = 32,
) -> int:
    """
    Decide a sensible default pool size. Override via env var `HL_WORKERS`.

    cpu_bound=True  -> close to CPU count (numpy releases the GIL in the hot loops)
    cpu_bound=False -> allow more threads (file writes)
    """
    # explicit override
    val = os.getenv(env_var)
    if val:
        try:
            n = int(val)
            return max(1, n)
        except ValueError:
            pass

    cpu = os.cpu_count() or 4
    n = cpu if cpu_bound else cpu * 4
    return max(minimum, min(cap, n))
