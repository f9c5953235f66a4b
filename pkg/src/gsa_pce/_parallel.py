"""Thread-pool mapping that is deterministic regardless of scheduling.

Tasks must be pure functions of their argument; results are collected in
argument order, so the output never depends on interleaving.  The pool size
is capped by the GSA_PCE_THREADS environment variable (all cores when unset).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigError


def thread_cap() -> int:
    raw = os.environ.get("GSA_PCE_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        cap = int(raw)
    except ValueError:
        raise ConfigError(f"GSA_PCE_THREADS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ConfigError(f"GSA_PCE_THREADS must be >= 1, got {cap}")
    return cap


def ordered_map(fn, items) -> list:
    items = list(items)
    workers = min(thread_cap(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
