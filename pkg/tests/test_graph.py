import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trienum.graph import (
    GraphFormatError, canonicalize, gen_clique, gen_cycle, gen_gnm, gen_hub, gen_path,
    gen_star, gen_tripartite_join, load, load_graph, pack2, pack3, save, unpack2, unpack3,
)

from conftest import brute_triangles

raw_edge_lists = st.lists(st.tuples(st.integers(0, 25), st.integers(0, 25)), max_size=120)


def test_dedupe_and_loops():
    g = canonicalize([(1, 0), (0, 1), (2, 2)])
    assert g.n_edges == 1
    assert sorted(g.edges[0].tolist()) == [0, 1]


def test_k4_in_any_order():
    raw = gen_clique(4)[::-1][:, ::-1]
    g = canonicalize(raw)
    assert g.n_edges == 6
    r = g.rank_edges()
    assert (r[:, 0] < r[:, 1]).all()
    assert (np.lexsort(r.T[::-1]) == np.arange(6)).all()


def test_star_orientation():
    g = canonicalize(gen_star(5))
    assert g.order[-1] == 0
    assert (g.edges[:, 1] == 0).all()


def test_empty():
    g = canonicalize([])
    assert g.n_edges == 0 and g.n_vertices == 0


@settings(max_examples=80, deadline=None)
@given(raw_edge_lists)
def test_canonical_properties(raw):
    g = canonicalize(raw)
    d = g.degrees
    u, v = g.edges[:, 0], g.edges[:, 1]
    assert ((d[u] < d[v]) | ((d[u] == d[v]) & (u < v))).all()
    assert d.sum() == 2 * g.n_edges
    # idempotent
    h = canonicalize(g.edges, n_vertices=g.n_vertices)
    assert np.array_equal(h.edges, g.edges)
    assert np.array_equal(h.order, g.order)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, (1 << 21) - 1), min_size=3, max_size=3))
def test_packing_round_trip(x):
    a, b, c = x
    assert tuple(int(t) for t in unpack2(pack2(a, b))) == (a, b)
    assert tuple(int(t) for t in unpack3(pack3(a, b, c))) == (a, b, c)


def test_packing_order_is_lexicographic():
    pairs = np.array([(0, 5), (1, 0), (0, 7), (2, 1)])
    keys = pack2(pairs[:, 0], pairs[:, 1])
    assert np.array_equal(np.argsort(keys), np.lexsort(pairs.T[::-1]))


@pytest.mark.parametrize("n,edges,tris", [(3, 3, 1), (4, 6, 4), (32, 496, 4960)])
def test_clique_counts(n, edges, tris):
    raw = gen_clique(n)
    assert len(raw) == edges
    assert len(brute_triangles(raw)) == tris


def test_gnm():
    assert canonicalize(gen_gnm(10, 45, 3)).n_edges == 45
    assert canonicalize(gen_gnm(10, 45, 99)).n_edges == 45
    assert len(gen_gnm(100, 0, 1)) == 0
    assert np.array_equal(gen_gnm(50, 200, 7), gen_gnm(50, 200, 7))
    g = canonicalize(gen_gnm(50, 200, 7))
    assert g.n_edges == 200
    with pytest.raises(ValueError):
        gen_gnm(5, 11, 0)


def test_tripartite():
    raw = gen_tripartite_join(2, 2, 2, 1.0, 0)
    assert len(raw) == 12
    assert len(brute_triangles(raw)) == 8
    assert len(gen_tripartite_join(3, 3, 3, 0.0, 0)) == 0
    assert len(brute_triangles(gen_tripartite_join(1, 1, 1, 1.0, 0))) == 1
    with pytest.raises(ValueError):
        gen_tripartite_join(1, 1, 1, 1.5, 0)


def test_small_generators():
    assert len(gen_path(5)) == 4
    assert len(gen_cycle(5)) == 5
    assert len(brute_triangles(gen_cycle(5))) == 0
    hub = canonicalize(gen_hub(40, 60, 30, 1))
    assert hub.degrees[40] == 30


def test_text_round_trip(tmp_path):
    p = tmp_path / "k3.txt"
    p.write_text("0 1\n1 2\n0 2\n")
    g = canonicalize(load(p))
    assert g.n_edges == 3 and len(brute_triangles(g.edges)) == 1
    q = tmp_path / "out.txt"
    save(g, q)
    assert np.array_equal(load_graph(q).edges, g.edges)


def test_comments(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("# header\n0 1  # trailing\n\n1 2\n")
    assert load(p).tolist() == [[0, 1], [1, 2]]


def test_parse_errors_name_line(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0 1\n0 x\n")
    with pytest.raises(GraphFormatError, match=":2:"):
        load(p)
    p.write_text("0 1 2\n")
    with pytest.raises(GraphFormatError, match=":1:"):
        load(p)


def test_binary_round_trip(tmp_path):
    g = canonicalize(np.r_[gen_clique(5), [[7, 8]]], n_vertices=12)
    p = tmp_path / "g.bin"
    save(g, p)
    h = load_graph(p)
    assert h.n_vertices == 12
    assert np.array_equal(h.edges, g.edges)
    raw = p.read_bytes()
    p.write_bytes(raw[:-8])
    with pytest.raises(GraphFormatError):
        load(p)
