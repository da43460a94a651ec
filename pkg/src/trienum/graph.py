"""Graphs in degree-ordered canonical form, generators and file formats."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Vertex ranks are packed into single disk words: an edge (u, v) becomes
# u << ID_BITS | v and a wedge/triangle (a, b, c) becomes a << 2·ID_BITS | b << ID_BITS | c.
# Numeric order of packed words equals lexicographic order of the tuples.
ID_BITS = 21
ID_MASK = (1 << ID_BITS) - 1
MAX_VERTICES = 1 << ID_BITS


def pack2(u, v):
    return (np.asarray(u, dtype=np.int64) << ID_BITS) | np.asarray(v, dtype=np.int64)


def unpack2(w):
    w = np.asarray(w, dtype=np.int64)
    return w >> ID_BITS, w & ID_MASK


def pack3(a, b, c):
    a = np.asarray(a, dtype=np.int64)
    return (a << (2 * ID_BITS)) | (np.asarray(b, dtype=np.int64) << ID_BITS) | np.asarray(c, dtype=np.int64)


def unpack3(w):
    w = np.asarray(w, dtype=np.int64)
    return w >> (2 * ID_BITS), (w >> ID_BITS) & ID_MASK, w & ID_MASK


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with edges oriented and sorted by degree order.

    ``edges[i] = (u, v)`` holds raw vertex ids with ``rank[u] < rank[v]``;
    rows are sorted lexicographically by ``(rank[u], rank[v])``.
    """

    edges: np.ndarray
    degrees: np.ndarray
    rank: np.ndarray
    order: np.ndarray

    @property
    def n_vertices(self) -> int:
        return int(self.degrees.size)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    def rank_edges(self) -> np.ndarray:
        """Edges in rank space, ``(E, 2)``, sorted lexicographically."""
        return self.rank[self.edges] if self.n_edges else np.empty((0, 2), dtype=np.int64)

    def packed(self) -> np.ndarray:
        re = self.rank_edges()
        return pack2(re[:, 0], re[:, 1]) if re.size else np.empty(0, dtype=np.int64)

    def to_raw(self, ranks: np.ndarray) -> np.ndarray:
        return self.order[ranks]

    def precedes(self, u: int, v: int) -> bool:
        return bool(self.rank[u] < self.rank[v])

    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.degrees.size else 0


def _as_pairs(raw_edges) -> np.ndarray:
    arr = np.asarray(raw_edges, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    if (arr < 0).any():
        raise ValueError("vertex ids must be non-negative")
    return arr


def canonicalize(raw_edges, n_vertices: int | None = None) -> Graph:
    """Drop loops and duplicates, compute the degree order, orient and sort."""
    arr = _as_pairs(raw_edges)
    arr = arr[arr[:, 0] != arr[:, 1]]
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    if lo.size:
        und = np.unique(np.stack([lo, hi], axis=1), axis=0)
    else:
        und = np.empty((0, 2), dtype=np.int64)
    V = int(und.max()) + 1 if und.size else 0
    if n_vertices is not None:
        if n_vertices < V:
            raise ValueError(f"n_vertices={n_vertices} but edge endpoint {V - 1} present")
        V = n_vertices
    if V > MAX_VERTICES:
        raise ValueError(f"at most {MAX_VERTICES} vertices supported")
    degrees = np.bincount(und.ravel(), minlength=V).astype(np.int64)
    # degree ascending, ties by raw id ascending
    order = np.lexsort((np.arange(V), degrees)).astype(np.int64)
    rank = np.empty(V, dtype=np.int64)
    rank[order] = np.arange(V)
    if und.size:
        ru, rv = rank[und[:, 0]], rank[und[:, 1]]
        swap = ru > rv
        oriented = np.where(swap[:, None], und[:, ::-1], und)
        a, b = np.minimum(ru, rv), np.maximum(ru, rv)
        oriented = oriented[np.lexsort((b, a))]
    else:
        oriented = und
    for x in (oriented, degrees, rank, order):
        x.setflags(write=False)
    return Graph(oriented, degrees, rank, order)


# -- generators ---------------------------------------------------------------


def gen_clique(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    i, j = np.triu_indices(n, 1)
    return np.stack([i, j], axis=1).astype(np.int64)


def gen_gnm(n: int, m: int, seed: int) -> np.ndarray:
    total = n * (n - 1) // 2
    if m > total or m < 0:
        raise ValueError(f"m={m} outside [0, {total}] for n={n}")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(total, size=m, replace=False)).astype(np.int64)
    # invert idx = i*n - i*(i+1)/2 + (j - i - 1) over the upper triangle
    row_start = np.arange(n, dtype=np.int64) * n - np.arange(n, dtype=np.int64) * (np.arange(n, dtype=np.int64) + 1) // 2
    i = np.searchsorted(row_start, idx, side="right") - 1
    j = idx - row_start[i] + i + 1
    return np.stack([i, j], axis=1)


def gen_tripartite_join(a: int, b: int, c: int, density: float, seed: int) -> np.ndarray:
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    bounds = np.cumsum([0, a, b, c])
    parts = []
    for x, y in ((0, 1), (1, 2), (0, 2)):
        p = np.arange(bounds[x], bounds[x + 1])
        q = np.arange(bounds[y], bounds[y + 1])
        pp, qq = np.meshgrid(p, q, indexing="ij")
        pairs = np.stack([pp.ravel(), qq.ravel()], axis=1)
        keep = rng.random(pairs.shape[0]) < density
        parts.append(pairs[keep])
    return np.concatenate(parts).astype(np.int64)


def gen_path(n: int) -> np.ndarray:
    i = np.arange(max(n - 1, 0))
    return np.stack([i, i + 1], axis=1).astype(np.int64)


def gen_cycle(n: int) -> np.ndarray:
    if n < 3:
        raise ValueError("a cycle needs n >= 3")
    i = np.arange(n)
    return np.stack([i, (i + 1) % n], axis=1).astype(np.int64)


def gen_star(leaves: int) -> np.ndarray:
    """Center 0 joined to vertices 1..leaves."""
    i = np.arange(1, leaves + 1)
    return np.stack([np.zeros_like(i), i], axis=1).astype(np.int64)


def gen_hub(n: int, m: int, hub_degree: int, seed: int) -> np.ndarray:
    """G(n, m) plus one extra vertex adjacent to ``hub_degree`` random vertices."""
    rng = np.random.default_rng(seed)
    base = gen_gnm(n, m, seed)
    nb = rng.choice(n, size=min(hub_degree, n), replace=False)
    hub = np.stack([np.full(nb.size, n), nb], axis=1)
    return np.concatenate([base, hub]).astype(np.int64)


GENERATORS = {
    "clique": gen_clique,
    "gnm": gen_gnm,
    "tripartite": gen_tripartite_join,
    "path": gen_path,
    "cycle": gen_cycle,
    "star": gen_star,
    "hub": gen_hub,
}


# -- files ----------------------------------------------------------------------

_BIN_HEADER = struct.Struct("<QQ")


def load(path) -> np.ndarray:
    """Read raw edges from a text edge list or the canonical binary format."""
    path = Path(path)
    if path.suffix == ".bin":
        return _load_bin(path)
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            tok = s.split()
            if len(tok) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected 'u v', got {line.rstrip()!r}")
            try:
                u, v = int(tok[0]), int(tok[1])
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: non-integer token in {line.rstrip()!r}") from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"{path}:{lineno}: negative vertex id")
            pairs.append((u, v))
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def save(graph: Graph, path) -> None:
    path = Path(path)
    if path.suffix == ".bin":
        with open(path, "wb") as fh:
            fh.write(_BIN_HEADER.pack(graph.n_vertices, graph.n_edges))
            fh.write(graph.edges.astype("<u8").tobytes())
        return
    with open(path, "w") as fh:
        fh.write(f"# V={graph.n_vertices} E={graph.n_edges}\n")
        for u, v in graph.edges.tolist():
            fh.write(f"{u} {v}\n")


def _load_bin(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    if len(raw) < _BIN_HEADER.size:
        raise GraphFormatError(f"{path}: truncated header")
    _, n_edges = _BIN_HEADER.unpack_from(raw)
    body = np.frombuffer(raw, dtype="<u8", offset=_BIN_HEADER.size)
    if body.size != 2 * n_edges:
        raise GraphFormatError(f"{path}: header says {n_edges} edges, body holds {body.size / 2}")
    return body.astype(np.int64).reshape(-1, 2)


def load_graph(path) -> Graph:
    path = Path(path)
    if path.suffix == ".bin":
        with open(path, "rb") as fh:
            head = fh.read(_BIN_HEADER.size)
        if len(head) == _BIN_HEADER.size:
            return canonicalize(load(path), n_vertices=_BIN_HEADER.unpack(head)[0])
    return canonicalize(load(path))
