import sys
import warnings

import numpy as np
import pytest

from trienum.blockio import EXPLICIT, LRU, IOConfig, TallCacheWarning, make_engine
from trienum.enumeration import TriangleSink


def engine(M=64, B=8, mode=EXPLICIT, trace=False):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TallCacheWarning)
        return make_engine(IOConfig(M, B, mode), record_trace=trace)


def lru_engine(M=64, B=8, trace=False):
    return engine(M, B, LRU, trace)


def brute_triangles(raw_edges, order_rank=None):
    """All vertex triples whose three pairs are edges, as sorted raw-id tuples."""
    E = {(min(u, v), max(u, v)) for u, v in np.asarray(raw_edges).reshape(-1, 2).tolist() if u != v}
    adj = {}
    for u, v in E:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    out = set()
    for u, v in E:
        for w in adj[u] & adj[v]:
            out.add(tuple(sorted((u, v, w))))
    return out


def as_sets(tris):
    return {tuple(sorted(t)) for t in np.asarray(tris).reshape(-1, 3).tolist()}


@pytest.fixture
def list_sink():
    return TriangleSink("list", check_witness=True)


def pytest_terminal_summary(terminalreporter):
    # one PASS/FAIL line per acceptance criterion, in criterion order
    for name, mod in list(sys.modules.items()):
        if name.endswith("test_acceptance") and getattr(mod, "LINES", None):
            terminalreporter.section("acceptance criteria")
            for k in sorted(mod.LINES):
                terminalreporter.write_line(mod.LINES[k])
