"""Simulated external memory.

Two engines share one interface so that every algorithm in the package can
run against either of them:

* :class:`ExplicitIO` charges one I/O per block transfer that the algorithm
  asks for and enforces the internal-memory budget declared through
  :meth:`IOEngine.hold`.
* :class:`LRUIO` turns every access into block touches against an LRU cache of
  ``M // B`` frames and charges misses (plus write-backs of dirty victims).
  Algorithms running on it never look at ``M`` or ``B``.

A disk word holds one record: a vertex id, or an edge / wedge packed into a
single integer (see :mod:`trienum.graph`).
"""

from __future__ import annotations

import math
import warnings
from collections import OrderedDict
from contextlib import contextmanager
from dataclasses import asdict, dataclass, replace
from typing import Iterator, Sequence

import numpy as np

EXPLICIT = "explicit"
LRU = "lru-simulated"


class MemoryBudgetError(RuntimeError):
    """An explicit-mode algorithm declared more than M resident words."""


class TallCacheWarning(UserWarning):
    pass


@dataclass(frozen=True)
class IOConfig:
    M: int
    B: int
    mode: str = EXPLICIT

    def __post_init__(self):
        if self.B < 1 or self.M < self.B:
            raise ValueError(f"need M >= B >= 1, got M={self.M}, B={self.B}")
        if self.mode not in (EXPLICIT, LRU):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.tall_cache:
            warnings.warn(
                f"M={self.M} < B^2={self.B * self.B}: tall-cache assumption violated",
                TallCacheWarning,
                stacklevel=3,
            )

    @property
    def tall_cache(self) -> bool:
        return self.M >= self.B * self.B

    @property
    def frames(self) -> int:
        return max(1, self.M // self.B)

    def with_mode(self, mode: str) -> "IOConfig":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TallCacheWarning)
            return replace(self, mode=mode)


@dataclass
class IOStats:
    reads: int = 0
    writes: int = 0
    peak_mem_words: int = 0

    @property
    def total(self) -> int:
        return self.reads + self.writes

    def to_dict(self) -> dict:
        d = asdict(self)
        d["total"] = self.total
        return d

    def copy(self) -> "IOStats":
        return IOStats(self.reads, self.writes, self.peak_mem_words)

    def __sub__(self, other: "IOStats") -> "IOStats":
        return IOStats(self.reads - other.reads, self.writes - other.writes, self.peak_mem_words)


class VirtualDisk:
    """Word-addressable disk; block ``k`` spans words ``[kB, (k+1)B)``."""

    def __init__(self, B: int, capacity: int = 0):
        self.B = B
        self.words = np.zeros(max(capacity, B), dtype=np.int64)
        self.length = 0

    @property
    def n_blocks(self) -> int:
        return -(-self.length // self.B)

    def ensure(self, n_words: int) -> None:
        if n_words > self.words.size:
            new = np.zeros(max(n_words, 2 * self.words.size), dtype=np.int64)
            new[: self.words.size] = self.words
            self.words = new
        self.length = max(self.length, n_words)

    def check_block(self, k: int) -> None:
        if not 0 <= k < self.n_blocks:
            raise IndexError(f"block {k} outside disk of {self.n_blocks} blocks")

    def block(self, k: int) -> np.ndarray:
        self.check_block(k)
        return self.words[k * self.B : (k + 1) * self.B]


@dataclass
class ExtRun:
    """A contiguous region of ``n`` one-word records starting at word ``start``."""

    start: int
    n: int
    sorted_by: str | None = None

    @property
    def end(self) -> int:
        return self.start + self.n

    def view(self, lo: int, hi: int, sorted_by: str | None | object = ...) -> "ExtRun":
        lo = max(0, lo)
        hi = min(self.n, hi)
        return ExtRun(self.start + lo, max(0, hi - lo), self.sorted_by if sorted_by is ... else sorted_by)

    def __len__(self) -> int:
        return self.n


def blocks_spanned(start: int, n: int, B: int) -> tuple[int, int]:
    """First block and block count covered by words ``[start, start+n)``."""
    if n <= 0:
        return start // B, 0
    first = start // B
    last = (start + n - 1) // B
    return first, last - first + 1


class IOEngine:
    """Common machinery: allocation, data access and residency accounting."""

    aware = True

    def __init__(self, cfg: IOConfig):
        self.cfg = cfg
        self.B = cfg.B
        self.disk = VirtualDisk(cfg.B)
        self.stats = IOStats()
        self.resident = 0
        self._top = 0
        self.peak_disk_words = 0

    # -- allocation -------------------------------------------------------
    def alloc(self, n: int, sorted_by: str | None = None) -> ExtRun:
        start = -(-self._top // self.B) * self.B
        self._top = start + n
        self.disk.ensure(self._top)
        self.peak_disk_words = max(self.peak_disk_words, self._top)
        return ExtRun(start, n, sorted_by)

    def mark(self) -> int:
        return self._top

    def release(self, mark: int) -> None:
        self._top = mark

    def load(self, arr, sorted_by: str | None = None) -> ExtRun:
        """Place input data on disk without charging I/O."""
        arr = np.asarray(arr, dtype=np.int64)
        run = self.alloc(arr.size, sorted_by)
        self.disk.words[run.start : run.end] = arr
        return run

    def data(self, run: ExtRun) -> np.ndarray:
        """Uncharged view of a run; only for setup and inspection."""
        return self.disk.words[run.start : run.end]

    # -- residency --------------------------------------------------------
    @contextmanager
    def hold(self, n_words: int) -> Iterator[None]:
        self.acquire(n_words)
        try:
            yield
        finally:
            self.resident -= n_words

    def acquire(self, n_words: int) -> None:
        want = self.resident + n_words
        if self.cfg.mode == EXPLICIT and want > self.cfg.M:
            raise MemoryBudgetError(f"resident set {want} words exceeds M={self.cfg.M}")
        self.resident = want
        if want > self.stats.peak_mem_words:
            self.stats.peak_mem_words = want

    def free(self, n_words: int) -> None:
        self.resident -= n_words

    # -- charged transfers ------------------------------------------------
    def read(self, run: ExtRun, lo: int = 0, hi: int | None = None) -> np.ndarray:
        """Sequentially read records ``[lo, hi)`` of ``run``."""
        hi = run.n if hi is None else min(hi, run.n)
        if hi <= lo:
            return np.empty(0, dtype=np.int64)
        self._charge_range(run.start + lo, hi - lo, write=False)
        return self.disk.words[run.start + lo : run.start + hi].copy()

    def write(self, arr, sorted_by: str | None = None) -> ExtRun:
        """Allocate a fresh run and write ``arr`` into it sequentially."""
        arr = np.asarray(arr, dtype=np.int64)
        run = self.alloc(arr.size, sorted_by)
        if arr.size:
            self.disk.words[run.start : run.end] = arr
            self._charge_range(run.start, arr.size, write=True)
        return run

    def charge_merge(self, inputs: Sequence[ExtRun], src_run: np.ndarray, src_pos: np.ndarray, out: ExtRun) -> None:
        """Charge a multiway merge that produced ``out``.

        ``src_run[j]``/``src_pos[j]`` give the input run and offset of output
        record ``j``.
        """
        raise NotImplementedError

    def _charge_range(self, start: int, n: int, write: bool) -> None:
        raise NotImplementedError


class ExplicitIO(IOEngine):
    """Cache-aware machine: every requested block transfer costs one I/O."""

    def __init__(self, cfg: IOConfig):
        super().__init__(cfg if cfg.mode == EXPLICIT else cfg.with_mode(EXPLICIT))

    def read_block(self, k: int) -> np.ndarray:
        blk = self.disk.block(k).copy()
        self.stats.reads += 1
        return blk

    def write_block(self, k: int, data) -> None:
        data = np.asarray(data, dtype=np.int64)
        if data.shape != (self.B,):
            raise ValueError(f"block write needs exactly B={self.B} words, got {data.size}")
        self.disk.block(k)[:] = data
        self.stats.writes += 1

    def _charge_range(self, start, n, write):
        _, count = blocks_spanned(start, n, self.B)
        if write:
            self.stats.writes += count
        else:
            self.stats.reads += count

    def charge_merge(self, inputs, src_run, src_pos, out):
        for r in inputs:
            self._charge_range(r.start, r.n, write=False)
        self._charge_range(out.start, out.n, write=True)


class LRUCache:
    """LRU set of block frames with write-back of dirty victims."""

    def __init__(self, frames: int):
        if frames < 1:
            raise ValueError("need at least one frame")
        self.frames = frames
        self.blocks: OrderedDict[int, bool] = OrderedDict()
        self.misses = 0
        self.writebacks = 0

    def access(self, blk: int, write: bool = False) -> bool:
        """Touch ``blk``; return True on a miss."""
        od = self.blocks
        if blk in od:
            od.move_to_end(blk)
            if write:
                od[blk] = True
            return False
        self.misses += 1
        if len(od) >= self.frames:
            _, dirty = od.popitem(last=False)
            if dirty:
                self.writebacks += 1
        od[blk] = write
        return True


def lru_misses(trace: np.ndarray, frames: int, writes: np.ndarray | None = None) -> int:
    """Replay a block trace through an LRU cache and return the miss count."""
    cache = LRUCache(frames)
    if writes is None:
        for b in trace.tolist():
            cache.access(b)
    else:
        for b, w in zip(trace.tolist(), writes.tolist()):
            cache.access(b, w)
    return cache.misses


class LRUIO(IOEngine):
    """Cache-oblivious machine: accesses become touches on an LRU cache."""

    aware = False

    def __init__(self, cfg: IOConfig, record_trace: bool = False):
        super().__init__(cfg if cfg.mode == LRU else cfg.with_mode(LRU))
        self.cache = LRUCache(self.cfg.frames)
        self.record_trace = record_trace
        self._trace_blocks: list[np.ndarray] = []
        self._trace_writes: list[np.ndarray] = []

    def touch(self, addr: int, kind: str = "read") -> None:
        if not 0 <= addr < self.disk.length:
            raise IndexError(f"address {addr} outside disk of {self.disk.length} words")
        self.touch_blocks(np.array([addr // self.B]), kind == "write")

    def touch_blocks(self, blocks: np.ndarray, write) -> None:
        blocks = np.asarray(blocks, dtype=np.int64)
        writes = np.broadcast_to(np.asarray(write, dtype=bool), blocks.shape)
        if self.record_trace:
            self._trace_blocks.append(blocks.copy())
            self._trace_writes.append(np.array(writes))
        cache = self.cache
        before_m, before_w = cache.misses, cache.writebacks
        if writes.all() or not writes.any():
            w = bool(writes.flat[0]) if blocks.size else False
            for b in blocks.tolist():
                cache.access(b, w)
        else:
            for b, w in zip(blocks.tolist(), writes.tolist()):
                cache.access(b, w)
        self.stats.reads += cache.misses - before_m
        self.stats.writes += cache.writebacks - before_w

    def _charge_range(self, start, n, write):
        first, count = blocks_spanned(start, n, self.B)
        if not count:
            return
        if self.record_trace:
            self.touch_blocks(np.arange(first, first + count), write)
            return
        # plain loop: ranges are usually a handful of blocks
        cache = self.cache
        od = cache.blocks
        misses = wb = 0
        for b in range(first, first + count):
            if b in od:
                od.move_to_end(b)
                if write:
                    od[b] = True
                continue
            misses += 1
            if len(od) >= cache.frames:
                _, dirty = od.popitem(last=False)
                wb += dirty
            od[b] = write
        cache.misses += misses
        cache.writebacks += wb
        self.stats.reads += misses
        self.stats.writes += wb

    def charge_merge(self, inputs, src_run, src_pos, out):
        # Each input block is touched when its first record is consumed, each
        # output block when its first record is produced.
        B = self.B
        starts = np.array([r.start for r in inputs], dtype=np.int64)
        in_blk = (starts[src_run] + src_pos) // B
        j = np.arange(src_run.size, dtype=np.int64)
        # a block is entered when the same run's previous record sat in another block
        order = np.lexsort((j, src_run))
        prev_blk = np.full(src_run.size, -1, dtype=np.int64)
        sb = in_blk[order]
        same_run = np.r_[False, src_run[order][1:] == src_run[order][:-1]]
        prev_blk[order[1:]] = np.where(same_run[1:], sb[:-1], -1)
        first_use = in_blk != prev_blk
        out_pos = out.start + j
        out_first = (out_pos % B == 0) | (j == 0)
        ev_time = np.r_[j[first_use] * 2, j[out_first] * 2 + 1]
        ev_blk = np.r_[in_blk[first_use], out_pos[out_first] // B]
        ev_w = np.r_[np.zeros(first_use.sum(), bool), np.ones(out_first.sum(), bool)]
        o = np.argsort(ev_time, kind="stable")
        self.touch_blocks(ev_blk[o], ev_w[o])

    def trace(self) -> tuple[np.ndarray, np.ndarray]:
        if not self._trace_blocks:
            return np.empty(0, np.int64), np.empty(0, bool)
        return np.concatenate(self._trace_blocks), np.concatenate(self._trace_writes)


def make_engine(cfg: IOConfig, record_trace: bool = False) -> IOEngine:
    if cfg.mode == LRU:
        return LRUIO(cfg, record_trace=record_trace)
    return ExplicitIO(cfg)


def sort_bound(n: float, cfg: IOConfig) -> float:
    """n·log2(n/B)/(B·log2 M) + n/B, with the log term clamped at zero."""
    if n <= 0:
        return 0.0
    B, M = cfg.B, cfg.M
    log_term = max(math.log2(n / B), 0.0)
    return n * log_term / (B * max(math.log2(M), 1.0)) + n / B
