"""Deterministic replicate runner, optionally thread-parallel.

Replicate ``r`` must derive all randomness from its own index (plus the master
seed), and results are always collected in replicate order, so the output is
byte-identical whatever ``threads`` is.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, TypeVar

from .errors import ReplicateError

T = TypeVar("T")


def run_replicates(
    fn: Callable[[int], T], reps: int, threads: int, master_seed: int
) -> list[T]:
    """Evaluate ``fn(0) .. fn(reps-1)``, returning results in index order.

    A failing replicate aborts the run with a `ReplicateError` that records
    the replicate index and master seed needed to reproduce it.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if threads <= 1:
        out: list[T] = []
        for r in range(reps):
            try:
                out.append(fn(r))
            except Exception as exc:
                raise ReplicateError(r, master_seed, exc) from exc
        return out

    results: list[T] = [None] * reps  # type: ignore[list-item]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {pool.submit(fn, r): r for r in range(reps)}
        try:
            for fut in as_completed(futures):
                r = futures[fut]
                try:
                    results[r] = fut.result()
                except Exception as exc:
                    raise ReplicateError(r, master_seed, exc) from exc
        except ReplicateError:
            pool.shutdown(wait=False, cancel_futures=True)
            raise
    return results
