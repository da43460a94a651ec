"""External-memory scan, stable multiway merge sort and key partitioning."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .blockio import IOEngine, ExtRun

KeyFn = Callable[[np.ndarray], np.ndarray]


def ext_scan(io: IOEngine, run: ExtRun, visitor: Callable[[np.ndarray], None]) -> None:
    """Feed ``run`` to ``visitor`` one block at a time."""
    B = io.B
    lo = 0
    with io.hold(min(B, run.n)):
        while lo < run.n:
            # stop at the next block boundary of the absolute address
            hi = min(run.n, (run.start + lo) // B * B + B - run.start)
            visitor(io.read(run, lo, hi))
            lo = hi


def _keys(words: np.ndarray, key: KeyFn | None) -> np.ndarray:
    return words if key is None else np.asarray(key(words), dtype=np.int64)


def ext_sort(io: IOEngine, run: ExtRun, key: KeyFn | None = None, key_id: str | None = None) -> ExtRun:
    """Stable external merge sort of ``run`` by ``key`` (record value by default).

    Runs of ``M`` records are formed in memory, then merged ``M//B - 1`` at a
    time. The LRU engine runs the same code; only the transfers it triggers are
    accounted differently.
    """
    key_id = key_id if key_id is not None else ("value" if key is None else None)
    if run.n == 0:
        return ExtRun(run.start, 0, key_id)
    if key_id is not None and run.sorted_by == key_id:
        return run
    M, B = io.cfg.M, io.cfg.B
    if M < 3 * B:
        raise ValueError(f"external sort needs M >= 3B (M={M}, B={B})")

    runs: list[ExtRun] = []
    for lo in range(0, run.n, M):
        hi = min(run.n, lo + M)
        with io.hold(hi - lo):
            chunk = io.read(run, lo, hi)
            order = np.argsort(_keys(chunk, key), kind="stable")
            runs.append(io.write(chunk[order]))
    return _merge_all(io, runs, key, key_id)


def ext_sort_stream(io: IOEngine, words: np.ndarray, key: KeyFn | None = None, key_id: str | None = None) -> ExtRun:
    """Sort records produced by a pipelined scan.

    ``words`` stands for the output of the producing pass, consumed ``M``
    records at a time by run formation, so only the run writes and the merge
    passes are charged.
    """
    key_id = key_id if key_id is not None else ("value" if key is None else None)
    words = np.asarray(words, dtype=np.int64)
    if words.size == 0:
        return io.alloc(0, key_id)
    M, B = io.cfg.M, io.cfg.B
    if M < 3 * B:
        raise ValueError(f"external sort needs M >= 3B (M={M}, B={B})")
    runs = []
    for lo in range(0, words.size, M):
        chunk = words[lo : lo + M]
        with io.hold(chunk.size):
            order = np.argsort(_keys(chunk, key), kind="stable")
            runs.append(io.write(chunk[order]))
    return _merge_all(io, runs, key, key_id)


def _merge_all(io: IOEngine, runs: list[ExtRun], key: KeyFn | None, key_id: str | None) -> ExtRun:
    fan_in = max(2, io.cfg.M // io.B - 1)
    while len(runs) > 1:
        merged = []
        for g in range(0, len(runs), fan_in):
            group = runs[g : g + fan_in]
            if len(group) == 1:
                merged.append(group[0])
                continue
            merged.append(_merge(io, group, key))
        runs = merged
    out = runs[0]
    out.sorted_by = key_id
    return out


def _merge(io: IOEngine, group: list[ExtRun], key: KeyFn | None) -> ExtRun:
    B = io.B
    with io.hold((len(group) + 1) * B):
        parts = [io.data(r) for r in group]
        words = np.concatenate(parts)
        src_run = np.repeat(np.arange(len(group)), [r.n for r in group])
        src_pos = np.concatenate([np.arange(r.n) for r in group])
        order = np.argsort(_keys(words, key), kind="stable")
        out = io.alloc(words.size)
        io.disk.words[out.start : out.end] = words[order]
        io.charge_merge(group, src_run[order], src_pos[order], out)
    return out


def ext_partition(io: IOEngine, run: ExtRun, key_fn: KeyFn, num_buckets: int) -> list[ExtRun]:
    """Split ``run`` into ``num_buckets`` contiguous runs by ``key_fn``.

    Sorting is stable, so each bucket keeps the input order; bucket
    boundaries are noted while the final merge pass streams out.
    """
    keys = np.asarray(key_fn(io.data(run)), dtype=np.int64)
    if keys.size and (keys.min() < 0 or keys.max() >= num_buckets):
        raise ValueError(f"partition key outside [0, {num_buckets})")
    inner = run.sorted_by
    srt = ext_sort(io, run, key=key_fn, key_id=f"partition:{id(key_fn)}")
    counts = np.bincount(keys, minlength=num_buckets)
    bounds = np.r_[0, np.cumsum(counts)]
    return [srt.view(int(bounds[i]), int(bounds[i + 1]), sorted_by=inner) for i in range(num_buckets)]
