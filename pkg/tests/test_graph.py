import io
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flipgraphs.graph import (INF, CellPartition, NotEquitable, bfs_layers, box_product, build_graph,
                              check_equitable, connected_components, equitable_refinement,
                              induced_subgraph, read_edge_list, write_edge_list)


def cycle(n):
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n):
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


@st.composite
def small_graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return build_graph(n, chosen)


def brute_geodesics(g, s):
    """Distances and shortest-path counts by enumerating every simple path from ``s``."""
    adj = g.adjacency
    best = {s: (0, 1)}

    def walk(v, seen, length):
        for w in adj[v]:
            if w in seen:
                continue
            d, c = best.get(w, (INF, 0))
            if length + 1 < d:
                best[w] = (length + 1, 1)
            elif length + 1 == d:
                best[w] = (d, c + 1)
            seen.add(w)
            walk(w, seen, length + 1)
            seen.discard(w)

    walk(s, {s}, 0)
    return best


def test_build_graph_merges_duplicates():
    g = build_graph(3, [(0, 1), (1, 0), (1, 2)])
    assert g.edge_count == 2
    assert g.degrees().tolist() == [1, 2, 1]


@pytest.mark.parametrize("edges", [[(0, 3)], [(1, 1)], [(-1, 0)]])
def test_build_graph_rejects_bad_edges(edges):
    with pytest.raises(ValueError):
        build_graph(3, edges)


def test_degree_needs_regularity():
    assert cycle(5).degree() == 2
    with pytest.raises(ValueError):
        path(3).degree()


def test_edges_are_ordered_pairs():
    e = cycle(4).edges()
    assert (e[:, 0] < e[:, 1]).all()
    assert len(e) == 4


def test_induced_subgraph_keeps_maps():
    sub = induced_subgraph(cycle(6), [0, 1, 2, 4])
    assert sub.to_parent.tolist() == [0, 1, 2, 4]
    assert sub.from_parent[4] == 3
    assert sub.graph.edge_count == 2


def test_components_ordered_by_smallest_vertex():
    g = build_graph(6, [(4, 5), (0, 3), (1, 2)])
    assert connected_components(g) == [[0, 3], [1, 2], [4, 5]]


def test_box_product_of_edges_is_square():
    k2 = build_graph(2, [(0, 1)])
    sq = box_product(k2, k2)
    assert sq.num_vertices == 4 and sq.degree() == 2
    assert sq.has_edge(0, 1) and sq.has_edge(0, 2) and not sq.has_edge(0, 3)


def test_bfs_unreachable_is_inf():
    r = bfs_layers(build_graph(3, [(0, 1)]), 0)
    assert r.dist == [0, 1, INF]
    assert r.layers() == [[0], [1]]


def test_even_cycle_antipode_has_two_geodesics():
    r = bfs_layers(cycle(8), 0)
    assert r.dist[4] == 4 and r.count[4] == 2
    assert r.eccentricity() == 4


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_bfs_matches_path_enumeration(g):
    r = bfs_layers(g, 0)
    best = brute_geodesics(g, 0)
    for v in range(g.num_vertices):
        d, c = best.get(v, (INF, 0))
        assert r.dist[v] == d
        assert r.count[v] == c


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_edge_list_round_trip(g):
    buf = io.StringIO()
    write_edge_list(g, buf)
    buf.seek(0)
    assert read_edge_list(buf) == g


def test_edge_list_header_mismatch():
    with pytest.raises(ValueError):
        read_edge_list(io.StringIO("p 3 2\ne 0 1\n"))
    with pytest.raises(ValueError):
        read_edge_list(io.StringIO("e 0 1\n"))


def test_partition_validation():
    with pytest.raises(ValueError):
        CellPartition([[0, 1], [1, 2]])
    with pytest.raises(ValueError):
        CellPartition([[0], [2]], 3)


def test_check_equitable_on_cycle():
    g = cycle(6)
    p = CellPartition([[0, 2, 4], [1, 3, 5]])
    assert check_equitable(g, p).tolist() == [[0, 2], [2, 0]]


def test_not_equitable_has_witness():
    g = path(3)
    p = CellPartition([[0, 1, 2]])
    with pytest.raises(NotEquitable) as info:
        check_equitable(g, p)
    u, v, cell = info.value.witness
    assert cell == 0
    counts = g.degrees()
    assert counts[u] != counts[v]


@settings(max_examples=60, deadline=None)
@given(small_graphs())
def test_refinement_is_equitable_and_finer(g):
    coarse = CellPartition([list(range(g.num_vertices))])
    fine = equitable_refinement(g, coarse)
    check_equitable(g, fine)
    # refining again changes nothing
    assert equitable_refinement(g, fine).same_as(fine)
    # vertices in one cell have the same degree
    for cell in fine.cells:
        assert len(set(g.degrees()[cell].tolist())) == 1


def test_refinement_splits_path():
    fine = equitable_refinement(path(5), CellPartition([list(range(5))]))
    assert fine.same_as(CellPartition([[0, 4], [1, 3], [2]]))
