"""Vertex colorings for color-coded triangle enumeration.

* :class:`FourWiseHash` - a random cubic polynomial over GF(2^k); its low bits
  give exactly 4-wise independent, exactly uniform colors.
* :class:`SmallBiasFamily` - an explicit almost 4-wise independent family of
  0/1 functions (LFSR small-bias space composed with an extended BCH code).
* :func:`greedy_derandomize` - fixes one color bit per level, each time
  picking the family member that minimises the collision potential.
"""

from __future__ import annotations

import math
import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import gf2


def _is_pow2(c: int) -> bool:
    return c >= 1 and c & (c - 1) == 0


def next_pow2(x: float) -> int:
    """Smallest power of two >= x (and >= 1)."""
    c = 1
    while c < x:
        c *= 2
    return c


def _width(universe: int) -> int:
    return max(1, math.ceil(math.log2(max(universe, 2))))


@dataclass(frozen=True)
class FourWiseHash:
    coeffs: tuple[int, int, int, int]
    k: int
    poly: int
    c: int
    seed: object = None

    def raw(self, v) -> np.ndarray:
        x = np.asarray(v, dtype=np.int64)
        a0, a1, a2, a3 = self.coeffs
        r = np.full(x.shape, a3, dtype=np.int64)
        for a in (a2, a1, a0):
            r = gf2.gf_mul(r, x, self.k, self.poly) ^ a
        return r

    def __call__(self, v) -> np.ndarray:
        return 1 + (self.raw(v) & (self.c - 1))


def sample_four_wise(seed, c: int, universe: int) -> FourWiseHash:
    if c < 2 or not _is_pow2(c):
        raise ValueError(f"number of colors must be a power of two >= 2, got {c}")
    k = max(_width(universe), c.bit_length() - 1)
    rng = np.random.default_rng(seed)
    coeffs = tuple(int(a) for a in rng.integers(0, 1 << k, size=4))
    return FourWiseHash(coeffs, k, gf2.field_poly(k), c, seed)


@dataclass(frozen=True)
class ColorAssignment:
    colors: np.ndarray
    c: int

    def __post_init__(self):
        if self.colors.size and (self.colors.min() < 1 or self.colors.max() > self.c):
            raise ValueError("colors outside 1..c")

    def save(self, path) -> None:
        with open(path, "w") as fh:
            for v, col in enumerate(self.colors.tolist()):
                fh.write(f"{v} {col}\n")

    @classmethod
    def load(cls, path, c: int | None = None) -> "ColorAssignment":
        arr = np.loadtxt(Path(path), dtype=np.int64, ndmin=2)
        colors = np.zeros(int(arr[:, 0].max()) + 1 if arr.size else 0, dtype=np.int64)
        colors[arr[:, 0]] = arr[:, 1]
        return cls(colors, c if c is not None else int(colors.max(initial=1)))


def refine_bit(xi: ColorAssignment, b) -> ColorAssignment:
    """New color 2·xi(v) - b(v); doubles the color count."""
    b = np.asarray(b, dtype=np.int64)
    return ColorAssignment(2 * xi.colors - b, 2 * xi.c)


# -- collision statistic ---------------------------------------------------------


@dataclass(frozen=True)
class CollisionStats:
    x_total: int
    x_adj: int
    x_nonadj: int


def _pairs(x) -> int:
    x = np.asarray(x, dtype=np.int64)
    return int((x * (x - 1) // 2).sum())


def collision_statistic(buckets, incidence) -> CollisionStats:
    """X from bucket sizes and per-(vertex, bucket) incident-edge counts."""
    x_total = _pairs(buckets)
    x_adj = _pairs(incidence)
    if x_adj > x_total:
        raise ValueError(f"inconsistent inputs: adjacent pairs {x_adj} exceed all pairs {x_total}")
    return CollisionStats(x_total, x_adj, x_total - x_adj)


def class_keys(edges: np.ndarray, colors: np.ndarray, c: int) -> np.ndarray:
    return (colors[edges[:, 0]] - 1) * c + (colors[edges[:, 1]] - 1)


def collision_stats(edges: np.ndarray, colors: np.ndarray, c: int | None = None) -> CollisionStats:
    """X, split into adjacent and non-adjacent pairs, for oriented ``edges``."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size == 0:
        return CollisionStats(0, 0, 0)
    c = int(colors.max()) if c is None else c
    key = class_keys(edges, colors, c)
    sizes = np.bincount(key)
    inc_keys = np.concatenate([edges[:, 0] * (c * c) + key, edges[:, 1] * (c * c) + key])
    _, inc = np.unique(inc_keys, return_counts=True)
    return collision_statistic(sizes, inc)


def collision_bruteforce(edges: np.ndarray, colors: np.ndarray) -> CollisionStats:
    """O(E^2) count over all edge pairs; used as an independent check."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    E = edges.shape[0]
    cu, cv = colors[edges[:, 0]], colors[edges[:, 1]]
    total = adj = 0
    step = max(1, 4_000_000 // max(E, 1))
    for lo in range(0, E, step):
        hi = min(E, lo + step)
        same = (cu[lo:hi, None] == cu[None, :]) & (cv[lo:hi, None] == cv[None, :])
        a, b = edges[lo:hi, 0, None], edges[lo:hi, 1, None]
        share = (a == edges[None, :, 0]) | (a == edges[None, :, 1]) | (b == edges[None, :, 0]) | (b == edges[None, :, 1])
        # keep ordered pairs i < j only
        upper = np.arange(lo, hi)[:, None] < np.arange(E)[None, :]
        total += int((same & upper).sum())
        adj += int((same & share & upper).sum())
    return CollisionStats(total, adj, total - adj)


# -- small-bias family ----------------------------------------------------------


@dataclass
class SmallBiasFamily:
    """Functions b_(f,s)(v) = <r(f,s), h(v)> over GF(2).

    ``h(v) = (1, v, v^3)`` with v read as an element of GF(2^k): any five
    distinct codewords are linearly independent (extended double-error
    correcting BCH code). ``r(f,s)`` is the length-n output of the LFSR with
    feedback polynomial ``f`` (irreducible, degree m) and start state ``s``;
    its bit i equals <s, x^i mod f>. Every nonempty XOR test on r has bias at
    most floor((n-1)/m)/#irreducibles(m).
    """

    alpha: float
    universe: int
    k: int
    m: int
    polys: tuple[int, ...]
    eps: float
    field: int = 0
    _tables: dict = dataclasses.field(default_factory=dict, repr=False)

    @property
    def n_bits(self) -> int:
        return 2 * self.k + 1

    @property
    def t(self) -> int:
        return len(self.polys) << self.m

    def h(self, v) -> np.ndarray:
        x = np.asarray(v, dtype=np.int64)
        x3 = gf2.gf_mul(gf2.gf_mul(x, x, self.k, self.field), x, self.k, self.field)
        return 1 | (x << 1) | (x3 << (self.k + 1))

    def columns(self, fi: int) -> np.ndarray:
        f = self.polys[fi]
        cols, cur = [], 1
        for _ in range(self.n_bits):
            cols.append(gf2.pmod(cur, f))
            cur = gf2.pmod(cur << 1, f)
        return np.array(cols, dtype=np.int64)

    def _byte_tables(self, fi: int) -> np.ndarray:
        tab = self._tables.get(fi)
        if tab is None:
            cols = self.columns(fi)
            n_bytes = -(-self.n_bits // 8)
            cols = np.r_[cols, np.zeros(8 * n_bytes - cols.size, dtype=np.int64)]
            idx = np.arange(256)
            tab = np.zeros((n_bytes, 256), dtype=np.int64)
            for j in range(n_bytes):
                for bit in range(8):
                    tab[j] ^= ((idx >> bit) & 1) * cols[8 * j + bit]
            self._tables[fi] = tab
        return tab

    def project(self, fi: int, vec) -> np.ndarray:
        """The linear map GF(2)^n -> GF(2)^m, y -> sum_i y_i (x^i mod f)."""
        vec = np.asarray(vec, dtype=np.int64)
        tab = self._byte_tables(fi)
        out = np.zeros(vec.shape, dtype=np.int64)
        for j in range(tab.shape[0]):
            out ^= tab[j][(vec >> (8 * j)) & 255]
        return out

    def split(self, index: int) -> tuple[int, int]:
        return index >> self.m, index & ((1 << self.m) - 1)

    def bits(self, index: int, v=None) -> np.ndarray:
        fi, s = self.split(index)
        v = np.arange(self.universe) if v is None else v
        return gf2.parity(self.project(fi, self.h(v)) & s)

    def matrix(self) -> np.ndarray:
        """All t functions on the whole universe, shape (t, universe)."""
        v = np.arange(self.universe)
        hv = self.h(v)
        s = np.arange(1 << self.m)
        rows = []
        for fi in range(len(self.polys)):
            g = self.project(fi, hv)
            rows.append(gf2.parity(s[:, None] & g[None, :]).astype(np.uint8))
        return np.concatenate(rows)


def _lfsr_bias(n_bits: int, m: int) -> float:
    return ((n_bits - 1) // m) / len(gf2.irreducibles(m))


@lru_cache(maxsize=None)
def _cached_family(alpha: float, k: int, universe: int) -> SmallBiasFamily:
    n_bits = 2 * k + 1
    target = alpha / 16
    m = 1
    while _lfsr_bias(n_bits, m) > target:
        m += 1
    return SmallBiasFamily(alpha, universe, k, m, gf2.irreducibles(m), _lfsr_bias(n_bits, m), gf2.field_poly(k))


def enumerate_small_bias(alpha: float, universe: int) -> SmallBiasFamily:
    """A family whose 4-vertex patterns each occur for at most (1+alpha)/16 of it.

    The XOR bias is kept at or below alpha/16, which is enough since a pattern
    frequency deviates from 1/16 by at most 15/16 of the largest bias.
    """
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    k = max(4, _width(universe))
    return _cached_family(float(alpha), k, int(universe))


# -- greedy derandomization --------------------------------------------------------


@dataclass
class LevelRecord:
    level: int
    poly_index: int
    start_state: int
    x_adj: int
    x_nonadj: int
    potential: Fraction
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.potential <= self.bound


@dataclass
class Derandomized:
    colors: np.ndarray
    c: int
    levels: list[LevelRecord]
    family_size: int
    counter_words: int

    def assignment(self) -> ColorAssignment:
        return ColorAssignment(self.colors, self.c)


def _adjacent_pair_terms(edges: np.ndarray, xi: np.ndarray, hv: np.ndarray, n_bits: int):
    """Weighted XOR vectors whose Walsh transform gives 4·X_adj for every b.

    Two edges sharing vertex v in the same class collide after refinement iff
    the bits of their far endpoints agree (same orientation), or iff the bits of
    v and both far endpoints agree (one edge leaves v, the other enters it).
    Each indicator expands into characters of XOR vectors of h-values.
    """
    dense = n_bits <= 24
    acc = np.zeros(1 << n_bits, dtype=np.int64) if dense else {}
    pending_d: list[np.ndarray] = []
    pending_w: list[np.ndarray] = []
    pending = [0]

    def flush():
        if not pending_d:
            return
        d = np.concatenate(pending_d)
        w = np.concatenate(pending_w)
        if dense:
            acc[:] += np.bincount(d, weights=w, minlength=acc.size).astype(np.int64)
        else:
            ud, inv = np.unique(d, return_inverse=True)
            ws = np.bincount(inv, weights=w).astype(np.int64)
            for a, b in zip(ud.tolist(), ws.tolist()):
                acc[a] = acc.get(a, 0) + b
        pending_d.clear()
        pending_w.clear()
        pending[0] = 0

    def push(d, w):
        pending_d.append(np.asarray(d, dtype=np.int64).ravel())
        pending_w.append(np.broadcast_to(np.asarray(w, dtype=np.float64), np.shape(d)).ravel())
        pending[0] += pending_d[-1].size
        if pending[0] > 4_000_000:
            flush()

    if edges.shape[0]:
        V = xi.size
        vert = np.concatenate([edges[:, 0], edges[:, 1]])
        other = np.concatenate([edges[:, 1], edges[:, 0]])
        role = np.r_[np.zeros(edges.shape[0], np.int64), np.ones(edges.shape[0], np.int64)]
        C = int(xi.max()) + 1
        gkey = (vert * 2 + role) * C + xi[other]
        order = np.argsort(gkey, kind="stable")
        gkey, other_s = gkey[order], other[order]
        starts = np.flatnonzero(np.r_[True, gkey[1:] != gkey[:-1]])
        sizes = np.diff(np.r_[starts, gkey.size])
        # same-orientation pairs, batched by group size
        for d in np.unique(sizes[sizes >= 2]).tolist():
            sel = starts[sizes == d]
            members = hv[other_s[sel[:, None] + np.arange(d)[None, :]]]
            i, j = np.triu_indices(d, 1)
            for lo in range(0, sel.size, max(1, 2_000_000 // max(i.size, 1))):
                blk = members[lo : lo + max(1, 2_000_000 // max(i.size, 1))]
                x = blk[:, i] ^ blk[:, j]
                push(x, 2.0)
                push(np.zeros(1, np.int64), 2.0 * x.size)
        # opposite-orientation pairs at v, all three colors equal
        gv = gkey // C // 2
        grole = (gkey // C) % 2
        own = gkey % C == xi[gv]
        gv_s = gv[starts]
        grole_s = grole[starts]
        own_s = own[starts]
        up_idx = {int(v): k for k, v in enumerate(gv_s) if own_s[k] and grole_s[k] == 0}
        for k in np.flatnonzero(own_s & (grole_s == 1)).tolist():
            v = int(gv_s[k])
            ku = up_idx.get(v)
            if ku is None:
                continue
            U = hv[other_s[starts[ku] : starts[ku] + sizes[ku]]]
            D = hv[other_s[starts[k] : starts[k] + sizes[k]]]
            h0 = hv[v]
            push(np.zeros(1, np.int64), float(U.size * D.size))
            push(h0 ^ D, float(U.size))
            push(h0 ^ U, float(D.size))
            push((U[:, None] ^ D[None, :]), 1.0)
    flush()
    if dense:
        nz = np.flatnonzero(acc)
        return nz.astype(np.int64), acc[nz]
    keys = np.array(sorted(acc), dtype=np.int64)
    return keys, np.array([acc[k] for k in keys.tolist()], dtype=np.int64)


def _derandomize(edges: np.ndarray, universe: int, c: int, M: int, n_edges_bound: int | None = None) -> Derandomized:
    if not _is_pow2(c):
        raise ValueError("c must be a power of two")
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    E = edges.shape[0]
    Eb = E if n_edges_bound is None else n_edges_bound
    colors = np.ones(universe, dtype=np.int64)
    L = c.bit_length() - 1
    if L == 0 or E == 0:
        return Derandomized(colors, c, [], 0, 0)
    # (1 + 1/L)^i · E · M, kept exact
    bound_at = lambda i: Fraction(L + 1, L) ** i * Eb * M  # noqa: E731

    x0 = collision_stats(edges, colors, 1)
    pot0 = Fraction(x0.x_nonadj, c * c) + Fraction(x0.x_adj, c)
    levels = [LevelRecord(0, -1, 0, x0.x_adj, x0.x_nonadj, pot0, bound_at(0))]

    fam = enumerate_small_bias(1.0 / L, universe)
    hv = fam.h(np.arange(universe))
    size = 1 << fam.m
    n_poly = len(fam.polys)
    g_all = np.stack([fam.project(fi, hv) for fi in range(n_poly)])
    u, v = edges[:, 0], edges[:, 1]
    counter_words = 0
    for i in range(1, L + 1):
        cprev = 1 << (i - 1)
        _, cls = np.unique((colors[u] - 1) * cprev + colors[v] - 1, return_inverse=True)
        K = int(cls.max()) + 1
        counter_words = max(counter_words, fam.t * K * 4)
        n_cls = np.bincount(cls, minlength=K)
        sq_n = int((n_cls * n_cls).sum())
        d_vec, d_w = _adjacent_pair_terms(edges, colors, hv, fam.n_bits)
        best = None
        for fi in range(n_poly):
            g = g_all[fi]
            gu, gv = g[u], g[v]
            base = cls * size
            hist = np.stack(
                [
                    np.bincount(base + gu, minlength=K * size),
                    np.bincount(base + gv, minlength=K * size),
                    np.bincount(base + (gu ^ gv), minlength=K * size),
                ]
            ).reshape(3, K, size)
            W = gf2.fwht(hist.astype(np.int64))
            sum_n2 = (sq_n + (W * W).sum(axis=(0, 1))) // 4
            x_tot = (sum_n2 - E) // 2
            H = np.bincount(fam.project(fi, d_vec), weights=d_w.astype(np.float64), minlength=size)
            x_adj = gf2.fwht(np.rint(H).astype(np.int64)) // 4
            pot = (4**i) * (x_tot - x_adj) + (2**i) * c * x_adj
            s = int(np.argmin(pot))
            if best is None or pot[s] < best[0]:
                best = (int(pot[s]), fi, s, int(x_adj[s]), int(x_tot[s] - x_adj[s]))
        pot_c2, fi, s, xa, xn = best
        b = gf2.parity(g_all[fi] & s)
        colors = 2 * colors - b
        rec = LevelRecord(i, fi, s, xa, xn, Fraction(pot_c2, c * c), bound_at(i))
        # averaging over the family guarantees a member within (1 + 1/L) of the
        # previous potential; anything worse means the family is broken
        if rec.potential > Fraction(L + 1, L) * levels[-1].potential:
            raise RuntimeError(f"no family member keeps the potential within (1+alpha) at level {i}")
        levels.append(rec)
    return Derandomized(colors, c, levels, fam.t, counter_words)


def greedy_derandomize(graph, c: int, M: int) -> Derandomized:
    """Deterministic coloring of ``graph`` with ``c`` colors and X_xi < e·E·M.

    Requires every degree to be at most sqrt(E·M). Colors are indexed by raw
    vertex id.
    """
    E = graph.n_edges
    if graph.max_degree() ** 2 > E * M:
        raise ValueError("maximum degree exceeds sqrt(E·M); remove high-degree vertices first")
    if c < 1 or not _is_pow2(c):
        raise ValueError("c must be a power of two")
    res = _derandomize(graph.rank_edges(), graph.n_vertices, c, M)
    # back to raw ids
    raw = np.empty_like(res.colors)
    raw[graph.order] = res.colors
    res.colors = raw
    return res
