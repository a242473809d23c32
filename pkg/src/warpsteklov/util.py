"""Small shared helpers."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def ordered_parallel_map(fn, items, workers: int = 1) -> list:
    """Map preserving input order; results are deterministic for any worker
    count because assembly happens in sequence."""
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
