"""Experiment driver: single runs, parameter sweeps, bound formulas and fits."""

from __future__ import annotations

import csv
import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from .blockio import EXPLICIT, LRU, IOConfig, TallCacheWarning, make_engine
from .enumeration import ALGORITHMS, AlgoConfig, TriangleSink, oracle_enumerate
from .graph import GENERATORS, Graph, canonicalize

ALGO_IDS = ("oracle",) + tuple(ALGORITHMS)

CSV_COLUMNS = (
    "algo", "gen", "V", "E", "t", "M", "B", "seed", "reads", "writes", "io_total",
    "bound_upper", "bound_hu", "bound_lower", "wall_ms",
)
EXTRA_COLUMNS = ("ratio_upper", "ratio_lower", "below_scan_floor", "error")


def lower_bound(t: float, M: float, B: float) -> float:
    """t/(sqrt(M)·B) + t^(2/3)/B."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return t / (math.sqrt(M) * B) + t ** (2.0 / 3.0) / B


def bound_upper(E: float, M: float, B: float) -> float:
    return E**1.5 / (math.sqrt(M) * B)


def bound_hu(E: float, M: float, B: float) -> float:
    return E * E / (M * B)


@dataclass
class RunReport:
    algo: str
    gen: str
    V: int
    E: int
    t: int
    M: int
    B: int
    seed: int
    reads: int = 0
    writes: int = 0
    io_total: int = 0
    bound_upper: float = 0.0
    bound_hu: float = 0.0
    bound_lower: float = 0.0
    wall_ms: float = 0.0
    peak_mem_words: int = 0
    error: str = ""
    info: dict = field(default_factory=dict)

    @property
    def scan_floor(self) -> int:
        return -(-self.E // self.B)

    @property
    def below_scan_floor(self) -> bool:
        # the oracle does no simulated I/O, so it has no floor
        return self.algo != "oracle" and not self.error and self.io_total < self.scan_floor

    @property
    def ratio_upper(self) -> float:
        return self.io_total / self.bound_upper if self.bound_upper else float("nan")

    @property
    def ratio_lower(self) -> float:
        return self.io_total / self.bound_lower if self.bound_lower else float("nan")

    def row(self, wall: bool = True) -> dict:
        d = {k: getattr(self, k) for k in CSV_COLUMNS + EXTRA_COLUMNS}
        if not wall:
            del d["wall_ms"]
        return d

    def to_json(self) -> str:
        d = asdict(self)
        d.update(ratio_upper=self.ratio_upper, ratio_lower=self.ratio_lower, below_scan_floor=self.below_scan_floor)
        d["io_stats"] = {"reads": self.reads, "writes": self.writes, "total": self.io_total, "peak_mem_words": self.peak_mem_words}
        return json.dumps(d, default=_jsonable, indent=2)


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


def engine_mode(algo: str) -> str:
    return LRU if algo == "cache_oblivious" else EXPLICIT


def run_one(graph: Graph, algo: str, M: int, B: int, seed: int = 0, gen: str = "file",
            sink: TriangleSink | None = None, cfg: AlgoConfig | None = None, record_trace: bool = False):
    """Run one algorithm on one graph; returns ``(report, engine)``."""
    if algo not in ALGO_IDS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGO_IDS)}")
    sink = sink or TriangleSink("count")
    cfg = cfg or AlgoConfig(seed=seed)
    E = graph.n_edges
    rep = RunReport(algo, gen, graph.n_vertices, E, 0, M, B, seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TallCacheWarning)
        io = make_engine(IOConfig(M, B, engine_mode(algo)), record_trace=record_trace)
    t0 = time.perf_counter()
    if algo == "oracle":
        tris = oracle_enumerate(graph)
        sink.emit_many(tris)
        rep.t = int(tris.shape[0])
    else:
        res = ALGORITHMS[algo](graph, io, sink, cfg)
        rep.t = res.triangles
        rep.info = res.info
        rep.reads, rep.writes = res.stats.reads, res.stats.writes
        rep.io_total = res.stats.total
        rep.peak_mem_words = res.stats.peak_mem_words
    rep.wall_ms = (time.perf_counter() - t0) * 1e3
    rep.bound_upper = bound_upper(E, M, B)
    rep.bound_hu = bound_hu(E, M, B)
    rep.bound_lower = lower_bound(rep.t, M, B)
    return rep, io


# -- sweeps ------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    """A grid of (size, algorithm, M, B, seed) cells over one generator.

    Sizes mean: clique/path/cycle/star -> n; gnm/hub -> n with m = m_per_n·n;
    tripartite -> three classes of n vertices each.
    """

    gen: str
    sizes: tuple[int, ...]
    algos: tuple[str, ...]
    M: tuple[int, ...]
    B: tuple[int, ...]
    seeds: tuple[int, ...] = (0,)
    density: float = 0.5
    m_per_n: int = 4
    out: str = ""

    def __post_init__(self):
        if self.gen not in GENERATORS:
            raise ValueError(f"unknown generator {self.gen!r}")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("sizes must be strictly increasing")
        for a in self.algos:
            if a not in ALGO_IDS:
                raise ValueError(f"unknown algorithm {a!r}")

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        kv = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            if "=" not in s:
                raise ValueError(f"line {lineno}: expected key = value")
            k, v = (x.strip() for x in s.split("=", 1))
            kv[k] = v
        ints = lambda k: tuple(int(x) for x in kv[k].split(",") if x.strip())  # noqa: E731
        missing = {"gen", "sizes", "algos", "M", "B"} - kv.keys()
        if missing:
            raise ValueError(f"missing keys: {', '.join(sorted(missing))}")
        return cls(
            gen=kv["gen"],
            sizes=ints("sizes"),
            algos=tuple(a.strip() for a in kv["algos"].split(",") if a.strip()),
            M=ints("M"),
            B=ints("B"),
            seeds=ints("seeds") if "seeds" in kv else (0,),
            density=float(kv.get("density", 0.5)),
            m_per_n=int(kv.get("m_per_n", 4)),
            out=kv.get("out", ""),
        )

    @classmethod
    def load(cls, path) -> "SweepSpec":
        return cls.parse(Path(path).read_text())


def make_graph(gen: str, size: int, seed: int = 0, density: float = 0.5, m_per_n: int = 4) -> Graph:
    if gen == "clique":
        raw = GENERATORS[gen](size)
    elif gen in ("gnm", "hub"):
        m = min(m_per_n * size, size * (size - 1) // 2)
        raw = GENERATORS["gnm"](size, m, seed) if gen == "gnm" else GENERATORS["hub"](size, m, size // 2, seed)
    elif gen == "tripartite":
        raw = GENERATORS[gen](size, size, size, density, seed)
    else:
        raw = GENERATORS[gen](size)
    return canonicalize(raw)


def run_sweep(spec: SweepSpec) -> list[RunReport]:
    """One report per cell, in a fixed cell order; a failing cell is recorded, not raised."""
    reports = []
    for size, algo, M, B, seed in product(spec.sizes, spec.algos, spec.M, spec.B, spec.seeds):
        g = make_graph(spec.gen, size, seed, spec.density, spec.m_per_n)
        try:
            rep, _ = run_one(g, algo, M, B, seed, gen=f"{spec.gen}:{size}")
        except Exception as exc:  # noqa: BLE001 - keep sweeping
            rep = RunReport(algo, f"{spec.gen}:{size}", g.n_vertices, g.n_edges, 0, M, B, seed)
            rep.error = f"{type(exc).__name__}: {exc}"
        reports.append(rep)
    return reports


def write_csv(reports: list[RunReport], dest, wall: bool = True) -> None:
    """Write reports to a path or an open text stream."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_csv(reports, fh, wall)
        return
    cols = [c for c in CSV_COLUMNS + EXTRA_COLUMNS if wall or c != "wall_ms"]
    w = csv.DictWriter(dest, fieldnames=cols)
    w.writeheader()
    for r in reports:
        w.writerow(r.row(wall))


@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    n: int


def fit_scaling(xs, ys) -> Fit:
    """Least-squares line through (log x, log y)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size < 3:
        raise ValueError("need at least 3 points for a scaling fit")
    if (x <= 0).any() or (y <= 0).any():
        raise ValueError("scaling fit needs positive values")
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return Fit(float(slope), float(intercept), int(x.size))


def fit_reports(reports: list[RunReport]) -> Fit:
    ok = [r for r in reports if not r.error and r.io_total > 0]
    return fit_scaling([r.E for r in ok], [r.io_total for r in ok])
