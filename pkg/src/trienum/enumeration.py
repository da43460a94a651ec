"""Triangle enumeration algorithms on the simulated external memory.

All algorithms work in rank space (vertex id = position in the degree order),
so that an oriented edge ``(u, v)`` always has ``u < v`` and a triangle
``u < v < w`` has cone vertex ``u`` and pivot edge ``{v, w}``. Ranks are
mapped back to raw ids only when a triangle is handed to the sink.

Heavy lifting is vectorised over whole runs; the charged transfers and the
declared resident set are those of the streaming algorithm being modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Callable

import numpy as np

from .blockio import ExtRun, IOEngine, IOStats
from .coloring import _derandomize, next_pow2, sample_four_wise
from .extprim import ext_partition, ext_sort, ext_sort_stream
from .graph import ID_BITS, ID_MASK, Graph, pack2, pack3, unpack2, unpack3

LEX = "lex"


class WitnessError(AssertionError):
    """A triangle was emitted while one of its edges was not resident."""


# -- sinks ------------------------------------------------------------------------


class TriangleSink:
    """Receives every triangle as raw ids ``(a, b, c)`` in degree order.

    ``mode`` is ``count``, ``list``, ``null`` or ``callback``. With
    ``check_witness`` the emitting algorithm must declare the edges it holds
    in memory, and every emitted triangle is checked against them.
    """

    def __init__(self, mode: str = "count", callback: Callable | None = None, check_witness: bool = False):
        if mode not in ("count", "list", "null", "callback"):
            raise ValueError(f"unknown sink mode {mode!r}")
        if mode == "callback" and callback is None:
            raise ValueError("callback mode needs a callback")
        self.mode = mode
        self.callback = callback
        self.check_witness = check_witness
        self.count = 0
        self._chunks: list[np.ndarray] = []

    def emit(self, a: int, b: int, c: int) -> None:
        self.emit_many(np.array([[a, b, c]], dtype=np.int64))

    def emit_many(self, tris: np.ndarray) -> None:
        tris = np.asarray(tris, dtype=np.int64).reshape(-1, 3)
        if not tris.shape[0]:
            return
        self.count += tris.shape[0]
        if self.mode == "list":
            self._chunks.append(tris.copy())
        elif self.mode == "callback":
            for a, b, c in tris.tolist():
                self.callback(a, b, c)

    def emitted(self) -> np.ndarray:
        """All listed triangles in emission order."""
        if self.mode != "list":
            raise ValueError("only list sinks keep triangles")
        return np.concatenate(self._chunks) if self._chunks else np.empty((0, 3), dtype=np.int64)

    def canonical(self) -> np.ndarray:
        t = self.emitted()
        return t[np.lexsort(t.T[::-1])] if t.size else t

    def write(self, path) -> None:
        with open(Path(path), "w") as fh:
            for a, b, c in self.canonical().tolist():
                fh.write(f"{a} {b} {c}\n")


class _Emitter:
    """Maps rank triples to raw ids and runs the witness check."""

    def __init__(self, graph: Graph, sink: TriangleSink):
        self.order = graph.order
        self.sink = sink

    def __call__(self, tris: np.ndarray, resident: Callable[[], np.ndarray]) -> None:
        if not tris.size:
            return
        if self.sink.check_witness:
            keys = np.unique(resident())
            for x, y in ((0, 1), (0, 2), (1, 2)):
                q = pack2(tris[:, x], tris[:, y])
                pos = np.minimum(np.searchsorted(keys, q), max(keys.size - 1, 0))
                if keys.size == 0 or not (keys[pos] == q).all():
                    raise WitnessError("triangle emitted without its edges in internal memory")
        self.sink.emit_many(self.order[tris])


# -- configuration and results ----------------------------------------------------


@dataclass(frozen=True)
class AlgoConfig:
    pivot_load_fraction: float = 0.25
    seed: int = 0
    leaf_edges: int = 256

    def __post_init__(self):
        if not 0 < self.pivot_load_fraction < 1:
            raise ValueError("pivot_load_fraction must lie in (0, 1)")
        if self.leaf_edges < 1:
            raise ValueError("leaf_edges must be positive")


@dataclass
class AlgoResult:
    stats: IOStats
    triangles: int
    info: dict = field(default_factory=dict)


def _finish(io: IOEngine, sink: TriangleSink, start_count: int, **info) -> AlgoResult:
    return AlgoResult(io.stats.copy(), sink.count - start_count, info)


# -- in-memory helpers ---------------------------------------------------------------


def _wedge_triangles(keys: np.ndarray, closing: np.ndarray | None = None, batch: int = 1 << 22):
    """Yield triangles (u, v, w) from lexicographically sorted packed edges.

    Every wedge ``(u,v), (u,w)`` with ``v < w`` is closed by a lookup of
    ``(v,w)`` in ``closing`` (default: ``keys``).
    """
    closing = keys if closing is None else closing
    if keys.size < 2 or closing.size == 0:
        return
    a, b = unpack2(keys)
    n = keys.size
    grp_end = np.searchsorted(a, a, side="right")
    partners = grp_end - np.arange(n) - 1
    lo = 0
    cum = np.cumsum(partners)
    while lo < n:
        base = cum[lo - 1] if lo else 0
        hi = int(np.searchsorted(cum, base + batch, side="right"))
        hi = max(hi, lo + 1)
        cnt = partners[lo:hi]
        tot = int(cnt.sum())
        if tot:
            i = np.repeat(np.arange(lo, hi), cnt)
            offs = np.arange(tot) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            j = i + 1 + offs
            q = pack2(b[i], b[j])
            pos = np.minimum(np.searchsorted(closing, q), closing.size - 1)
            hit = closing[pos] == q
            if hit.any():
                yield np.stack([a[i[hit]], b[i[hit]], b[j[hit]]], axis=1)
        lo = hi


def oracle_enumerate(graph: Graph) -> np.ndarray:
    """Exact triangle set as raw ids in degree order, sorted canonically."""
    keys = graph.packed()
    parts = list(_wedge_triangles(keys))
    if not parts:
        return np.empty((0, 3), dtype=np.int64)
    t = graph.order[np.concatenate(parts)]
    return t[np.lexsort(t.T[::-1])]


def _in_memory_pass(io: IOEngine, run: ExtRun, emit: _Emitter) -> None:
    with io.hold(run.n):
        keys = io.read(run)
        for tris in _wedge_triangles(keys):
            emit(tris, lambda: keys)


def _load_graph(io: IOEngine, graph: Graph) -> ExtRun:
    return io.load(graph.packed(), sorted_by=LEX)


def _member(sorted_arr: np.ndarray, q: np.ndarray) -> np.ndarray:
    if sorted_arr.size == 0:
        return np.zeros(np.shape(q), dtype=bool)
    pos = np.minimum(np.searchsorted(sorted_arr, q), sorted_arr.size - 1)
    return sorted_arr[pos] == q


# -- block nested loop ----------------------------------------------------------------


def nested_loop(graph: Graph, io: IOEngine, sink: TriangleSink, cfg: AlgoConfig | None = None) -> AlgoResult:
    """Pipelined block-nested-loop join: chunks A, B in memory, C streamed.

    A triangle (u, v, w) is found when (u,v) is in chunk A, (v,w) in chunk B
    and (u,w) arrives in the scan of C.
    """
    start = sink.count
    emit = _Emitter(graph, sink)
    run = _load_graph(io, graph)
    E, M, B = run.n, io.cfg.M, io.cfg.B
    if E == 0:
        return _finish(io, sink, start)
    if E <= M:
        _in_memory_pass(io, run, emit)
        return _finish(io, sink, start, passes=1)
    chunk = (M - B) // 2
    if chunk < 1:
        raise ValueError(f"nested loop needs M > B (M={M}, B={B})")
    every = io.data(run)
    for alo in range(0, E, chunk):
        with io.hold(min(chunk, E - alo)):
            A = io.read(run, alo, alo + chunk)
            au, av = unpack2(A)
            for blo in range(0, E, chunk):
                with io.hold(min(chunk, E - blo)):
                    Bc = io.read(run, blo, blo + chunk)
                    bu, bw = unpack2(Bc)
                    # wedges u-v-w with (u,v) in A and (v,w) in B
                    bo = np.argsort(bu, kind="stable")
                    lo_ = np.searchsorted(bu[bo], av, side="left")
                    hi_ = np.searchsorted(bu[bo], av, side="right")
                    cnt = hi_ - lo_
                    tot = int(cnt.sum())
                    # streaming C through a B-word buffer
                    with io.hold(B):
                        io.read(run)
                    if not tot:
                        continue
                    ia = np.repeat(np.arange(A.size), cnt)
                    ib = bo[np.repeat(lo_, cnt) + np.arange(tot) - np.repeat(np.cumsum(cnt) - cnt, cnt)]
                    q = pack2(au[ia], bw[ib])
                    hit = _member(every, q)
                    tris = np.stack([au[ia[hit]], av[ia[hit]], bw[ib[hit]]], axis=1)
                    emit(tris, lambda: np.concatenate([A, Bc, q[hit]]))
    return _finish(io, sink, start, chunk=chunk)


# -- star subroutine --------------------------------------------------------------


def _star_core(io: IOEngine, run: ExtRun, v: int, emit: _Emitter, keep: Callable | None = None) -> None:
    """Triangles through rank ``v`` by two filtering passes over ``run``."""
    if run.n == 0:
        return
    if io.aware and run.n <= io.cfg.M - io.resident:
        with io.hold(run.n):
            keys = io.read(run)
            a, b = unpack2(keys)
            nb = np.unique(np.r_[a[b == v], b[a == v]])
            cand = keys[np.isin(a, nb) & np.isin(b, nb)]
            _emit_star(cand, v, emit, keep, lambda: keys)
        return
    mark = io.mark()
    try:
        _star_passes(io, run, v, emit, keep)
    finally:
        io.release(mark)


def _star_passes(io: IOEngine, run: ExtRun, v: int, emit: _Emitter, keep) -> None:
    # pass 1: Gamma_v comes out sorted because run is sorted lexicographically
    keys = io.read(run)
    a, b = unpack2(keys)
    gamma_arr = np.r_[a[b == v], b[a == v]]
    gamma = ext_sort(io, io.write(gamma_arr, sorted_by="value"))
    # pass 2: merge run (by first endpoint) with Gamma_v
    io.read(run)
    g = io.read(gamma)
    ev = keys[np.isin(a, g) & (b != v)]
    ev_sorted = ext_sort_stream(io, ev, key=lambda w: w & ID_MASK, key_id="second")
    # pass 3: merge E_v (by second endpoint) with Gamma_v
    with io.hold(3 * io.B if io.aware else 0):
        ev = io.read(ev_sorted)
        io.read(gamma)
        cand = ev[np.isin(ev & ID_MASK, g)]
        _emit_star(cand, v, emit, keep, lambda: np.r_[cand, pack2(np.minimum(g, v), np.maximum(g, v))])


def _emit_star(cand: np.ndarray, v: int, emit: _Emitter, keep, resident) -> None:
    if not cand.size:
        return
    u, w = unpack2(cand)
    tris = np.sort(np.stack([np.full(u.size, v), u, w], axis=1), axis=1)
    if keep is not None:
        tris = tris[keep(tris)]
    emit(tris, resident)


def _remove_vertex(io: IOEngine, run: ExtRun, v: int) -> ExtRun:
    with io.hold(2 * io.B if io.aware else 0):
        keys = io.read(run)
        a, b = unpack2(keys)
        return io.write(keys[(a != v) & (b != v)], sorted_by=run.sorted_by)


def star_enumerate(graph: Graph, v: int, io: IOEngine, sink: TriangleSink) -> IOStats:
    """Emit every triangle containing raw vertex ``v`` exactly once."""
    if not 0 <= v < graph.n_vertices or graph.degrees[v] < 2:
        return IOStats()
    before = io.stats.copy()
    run = _load_graph(io, graph)
    _star_core(io, run, int(graph.rank[v]), _Emitter(graph, sink))
    d = io.stats - before
    d.peak_mem_words = io.stats.peak_mem_words
    return d


# -- pivot subroutine ----------------------------------------------------------------


def pivot_chunk(io: IOEngine, n_runs: int, alpha: float) -> int:
    M, B = io.cfg.M, io.cfg.B
    chunk = min(int(alpha * M), (M - n_runs * B) // 3)
    if chunk < 1:
        raise ValueError(f"memory too small for pivot batching (M={M}, B={B}, runs={n_runs})")
    return chunk


def _pivot_core(io: IOEngine, runs: list[ExtRun], pivots: ExtRun, emit: _Emitter, alpha: float,
                cone_ok: Callable | None = None) -> None:
    """Triangles whose pivot edge lies in ``pivots``; cone edges come from ``runs``.

    Each round loads a batch of pivots, then scans every run once; edges (v, u)
    with u among the batch endpoints form Gamma_v and each pivot (u, w) is
    tested against it.
    """
    if pivots.n == 0:
        return
    runs = [r for r in runs if r.n]
    if not runs:
        return
    chunk = pivot_chunk(io, len(runs), alpha)
    inside = len(runs) == 1 and runs[0].start <= pivots.start and pivots.end <= runs[0].end
    total = sum(r.n for r in runs)
    if io.aware and inside and 3 * pivots.n + total <= io.cfg.M - io.resident:
        # everything fits: the pivots come for free with the single scan
        with io.hold(total + 2 * pivots.n):
            keys = io.read(runs[0])
            P = keys[pivots.start - runs[0].start : pivots.end - runs[0].start]
            _pivot_round(P, [keys], emit, cone_ok)
        return
    for lo in range(0, pivots.n, chunk):
        with io.hold(min(chunk, pivots.n - lo)):
            P = io.read(pivots, lo, lo + chunk)
            pu, pw = unpack2(P)
            gmem = np.unique(np.r_[pu, pw])
            with io.hold(gmem.size + len(runs) * io.B):
                scans = [io.read(r) for r in runs]
                _pivot_round(P, scans, emit, cone_ok, gmem)


def _pivot_round(P: np.ndarray, scans: list[np.ndarray], emit: _Emitter, cone_ok, gmem=None) -> None:
    pu, pw = unpack2(P)
    if gmem is None:
        gmem = np.unique(np.r_[pu, pw])
    F = np.unique(np.concatenate(scans)) if len(scans) > 1 else scans[0]
    fv, fu = unpack2(F)
    sel = np.isin(fu, gmem)
    if cone_ok is not None:
        sel &= cone_ok(fv)
    F = F[sel]
    if not F.size:
        return
    fv, fu = unpack2(F)
    # join pivots (u, w) with F-edges (v, u) on u
    fo = np.argsort(fu, kind="stable")
    fu_s = fu[fo]
    lo = np.searchsorted(fu_s, pu, side="left")
    cnt = np.searchsorted(fu_s, pu, side="right") - lo
    tot = int(cnt.sum())
    if not tot:
        return
    ip = np.repeat(np.arange(P.size), cnt)
    jf = fo[np.repeat(lo, cnt) + np.arange(tot) - np.repeat(np.cumsum(cnt) - cnt, cnt)]
    v = fv[jf]
    w = pw[ip]
    F_sorted = np.sort(F)
    hit = _member(F_sorted, pack2(v, w))
    tris = np.stack([v[hit], pu[ip[hit]], w[hit]], axis=1)
    emit(tris, lambda: np.r_[P, F])


def pivot_enumerate(graph: Graph, pivot_set, io: IOEngine, sink: TriangleSink, cfg: AlgoConfig | None = None) -> IOStats:
    """Emit the triangles whose pivot edge is in ``pivot_set`` (raw edge pairs).

    ``pivot_set=None`` means every edge.
    """
    cfg = cfg or AlgoConfig()
    run = _load_graph(io, graph)
    if pivot_set is None:
        piv = run
    else:
        pairs = np.asarray(pivot_set, dtype=np.int64).reshape(-1, 2)
        r = graph.rank[pairs] if pairs.size else np.empty((0, 2), dtype=np.int64)
        keys = np.unique(pack2(r.min(axis=1), r.max(axis=1))) if r.size else np.empty(0, dtype=np.int64)
        if not _member(io.data(run), keys).all():
            raise ValueError("pivot set contains a non-edge")
        piv = io.load(keys, sorted_by=LEX)
    before = io.stats.copy()
    _pivot_core(io, [run], piv, _Emitter(graph, sink), cfg.pivot_load_fraction)
    d = io.stats - before
    d.peak_mem_words = io.stats.peak_mem_words
    return d


def pivot_only(graph: Graph, io: IOEngine, sink: TriangleSink, cfg: AlgoConfig | None = None) -> AlgoResult:
    """Baseline: the pivot subroutine with every edge as a pivot."""
    cfg = cfg or AlgoConfig()
    start = sink.count
    run = _load_graph(io, graph)
    _pivot_core(io, [run], run, _Emitter(graph, sink), cfg.pivot_load_fraction)
    return _finish(io, sink, start)


# -- cache-aware randomized and deterministic ------------------------------------------


def _high_degree(io: IOEngine, graph: Graph) -> ExtRun:
    """Ranks with degree > sqrt(E·M), read off the on-disk degree table."""
    E, M = graph.n_edges, io.cfg.M
    deg = graph.degrees[graph.order]
    table = io.load(deg, sorted_by="value")
    d = io.read(table)
    # V_h goes back to disk; step 1 streams it, so sorts keep the whole of M
    high = np.flatnonzero(d * d > E * M)
    return io.write(high, sorted_by="value")


def _color_ranks(graph: Graph, colors_raw: np.ndarray) -> np.ndarray:
    return np.asarray(colors_raw, dtype=np.int64)[graph.order]


def _cache_aware_core(graph: Graph, io: IOEngine, sink: TriangleSink, cfg: AlgoConfig, coloring: str) -> AlgoResult:
    start = sink.count
    emit = _Emitter(graph, sink)
    run = _load_graph(io, graph)
    E, M = run.n, io.cfg.M
    if E == 0:
        return _finish(io, sink, start, c=0)
    if E <= M:
        _in_memory_pass(io, run, emit)
        return _finish(io, sink, start, c=1, single_pass=True)

    # step 1: high-degree vertices, each removed once its triangles are out
    high_run = _high_degree(io, graph)
    high = io.read(high_run)
    for v in high.tolist():
        _star_core(io, run, v, emit)
        run = _remove_vertex(io, run, v)

    # step 2: color and partition the low-degree edges
    c = next_pow2(math.sqrt(E / M))
    V = graph.n_vertices
    info: dict = {"c": c, "n_high": int(high.size), "E_low": run.n}
    if coloring == "random":
        xi = sample_four_wise(cfg.seed, c, V)
        col = _color_ranks(graph, xi(np.arange(V)))
    else:
        low = np.stack(unpack2(io.data(run)), axis=1)
        # one scan per level in each orientation, plus the re-sort by second endpoint
        by_second = ext_sort(io, run, key=lambda w: (w & ID_MASK) << ID_BITS | (w >> ID_BITS), key_id="second")
        res = _derandomize(low, V, c, M, n_edges_bound=E)
        for _ in res.levels[1:]:
            io.read(run)
            io.read(by_second)
        col = res.colors if res.colors.size else np.ones(V, dtype=np.int64)
        info["levels"] = [(r.level, float(r.potential), float(r.bound)) for r in res.levels]
        info["family_size"] = res.family_size
    a, b = unpack2(io.data(run))
    info["collisions"] = int(_class_pairs(col[a], col[b], c))

    def key(words, col=col, c=c):
        u, w = unpack2(words)
        return (col[u] - 1) * c + col[w] - 1

    buckets = ext_partition(io, run, key, c * c)
    info["bucket_total"] = sum(x.n for x in buckets)

    # step 3: every color triple, pivots from E[t2,t3], cone vertex colored t1
    alpha = cfg.pivot_load_fraction
    for t1, t2, t3 in product(range(c), repeat=3):
        piv = buckets[t2 * c + t3]
        if piv.n == 0:
            continue
        b12, b13 = buckets[t1 * c + t2], buckets[t1 * c + t3]
        runs = [b12] if b12.start == b13.start else [b12, b13]
        runs = [r for r in runs if r.n]
        if not runs:
            continue
        _pivot_core(io, runs, piv, emit, alpha, cone_ok=lambda v, t=t1 + 1: col[v] == t)
    return _finish(io, sink, start, **info)


def _class_pairs(cu: np.ndarray, cw: np.ndarray, c: int) -> int:
    n = np.bincount((cu - 1) * c + cw - 1)
    return int((n * (n - 1) // 2).sum())


def cache_aware(graph: Graph, io: IOEngine, sink: TriangleSink, cfg: AlgoConfig | None = None) -> AlgoResult:
    """Randomized cache-aware enumeration with 4-wise independent coloring."""
    return _cache_aware_core(graph, io, sink, cfg or AlgoConfig(), "random")


def deterministic(graph: Graph, io: IOEngine, sink: TriangleSink, cfg: AlgoConfig | None = None) -> AlgoResult:
    """The cache-aware algorithm with the greedily derandomized coloring."""
    return _cache_aware_core(graph, io, sink, cfg or AlgoConfig(), "greedy")


# -- cache-oblivious ---------------------------------------------------------------------


def _proper(target, col):
    c0, c1, c2 = target

    def keep(tris):
        return (col[tris[:, 0]] == c0) & (col[tris[:, 1]] == c1) & (col[tris[:, 2]] == c2)

    return keep


def _compatible(words: np.ndarray, target, col) -> np.ndarray:
    u, w = unpack2(words)
    cu, cw = col[u], col[w]
    c0, c1, c2 = target
    return ((cu == c0) & (cw == c1)) | ((cu == c0) & (cw == c2)) | ((cu == c1) & (cw == c2))


def base_enumerate(io: IOEngine, run: ExtRun, target, col: np.ndarray, emit: _Emitter) -> None:
    """Sort-based wedge join restricted to triangles colored ``target``."""
    if run.n < 3:
        if run.n:
            io.read(run)
        return
    c0, c1, c2 = target
    keys = io.read(run)
    u, w = unpack2(keys)
    left = keys[(col[u] == c0) & (col[w] == c1)]
    right = keys[(col[u] == c0) & (col[w] == c2)]
    if not left.size or not right.size:
        return
    # wedges (v, x, y): (v,x) from left, (v,y) from right, x < y
    lv, lx = unpack2(left)
    rv, ry = unpack2(right)
    ro = np.argsort(rv, kind="stable")
    rv_s, ry_s = rv[ro], ry[ro]
    lo = np.searchsorted(rv_s, lv, side="left")
    cnt = np.searchsorted(rv_s, lv, side="right") - lo
    tot = int(cnt.sum())
    if not tot:
        return
    il = np.repeat(np.arange(left.size), cnt)
    jr = np.repeat(lo, cnt) + np.arange(tot) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    x, y = lx[il], ry_s[jr]
    ok = x < y
    wedges = pack3(lv[il][ok], x[ok], y[ok])
    if not wedges.size:
        return
    wrun = io.write(wedges)
    srt = ext_sort(io, wrun, key=lambda q: q & ((1 << 2 * ID_BITS) - 1), key_id="closing")
    ws = io.read(srt)
    io.read(run)
    closing = keys[(col[u] == c1) & (col[w] == c2)]
    hit = _member(np.sort(closing), ws & ((1 << 2 * ID_BITS) - 1))
    if hit.any():
        tris = np.stack(unpack3(ws[hit]), axis=1)
        emit(tris, lambda: np.r_[keys])


class _Oblivious:
    """State of one cache-oblivious run; never consults M or B."""

    def __init__(self, graph: Graph, io: IOEngine, emit: _Emitter, cfg: AlgoConfig):
        self.io = io
        self.emit = emit
        self.cfg = cfg
        self.V = graph.n_vertices
        self.raw = graph.order
        self.colors = [np.ones(self.V, dtype=np.int64)]
        self.max_depth = int(math.floor(math.log(max(graph.n_edges, 1), 4)))
        self.subproblems = 0
        self.max_reached = 0
        self.high_removed = 0

    def color(self, depth: int) -> np.ndarray:
        while len(self.colors) <= depth:
            d = len(self.colors)
            bit = sample_four_wise([self.cfg.seed, d], 2, self.V)(self.raw) - 1
            self.colors.append(2 * self.colors[-1] - bit)
        return self.colors[depth]

    def solve(self, run: ExtRun, target, depth: int) -> None:
        if depth > self.max_depth:
            raise RecursionError("recursion below the depth cap")
        self.subproblems += 1
        self.max_reached = max(self.max_reached, depth)
        if run.n == 0:
            return
        io = self.io
        col = self.color(depth)
        if depth >= self.max_depth or run.n <= self.cfg.leaf_edges:
            base_enumerate(io, run, target, col, self.emit)
            return

        # step 1: local high degree (>= E/8): a frequent-items scan finds the
        # at most 16 candidates, a second scan counts them exactly
        keys = io.read(run)
        io.read(run)
        a, b = unpack2(keys)
        deg = np.bincount(np.r_[a, b])
        high = np.flatnonzero(8 * deg >= run.n)
        keep = _proper(target, col)
        for v in high.tolist():
            _star_core(io, run, v, self.emit, keep)
            run = _remove_vertex(io, run, v)
            self.high_removed += 1
        if run.n == 0:
            return

        # step 2: refine colors with one more random bit
        ncol = self.color(depth + 1)

        # step 3: the 8 children, skipping those with an empty color class
        keys = io.read(run)
        u, w = unpack2(keys)
        cls = set(zip(ncol[u].tolist(), ncol[w].tolist()))
        c0, c1, c2 = target
        for z in product((2 * c0 - 1, 2 * c0), (2 * c1 - 1, 2 * c1), (2 * c2 - 1, 2 * c2)):
            if (z[0], z[1]) not in cls or (z[0], z[2]) not in cls or (z[1], z[2]) not in cls:
                continue
            mark = io.mark()
            data = io.read(run)
            child = io.write(data[_compatible(data, z, ncol)], sorted_by=run.sorted_by)
            self.solve(child, z, depth + 1)
            io.release(mark)


def cache_oblivious(graph: Graph, io: IOEngine, sink: TriangleSink, cfg: AlgoConfig | None = None) -> AlgoResult:
    """Recursive color-refinement enumeration, measured under LRU."""
    cfg = cfg or AlgoConfig()
    start = sink.count
    run = _load_graph(io, graph)
    state = _Oblivious(graph, io, _Emitter(graph, sink), cfg)
    state.solve(run, (1, 1, 1), 0)
    return _finish(
        io, sink, start,
        subproblems=state.subproblems, depth=state.max_reached,
        depth_cap=state.max_depth, high_removed=state.high_removed,
    )


ALGORITHMS: dict[str, Callable[..., AlgoResult]] = {
    "nested_loop": nested_loop,
    "cache_aware": cache_aware,
    "cache_oblivious": cache_oblivious,
    "deterministic": deterministic,
    "pivot_only": pivot_only,
}
