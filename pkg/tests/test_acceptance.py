"""Acceptance criteria 1-13, one or more tests per criterion.

The per-criterion PASS/FAIL lines are printed by the terminal summary hook in
``conftest.py``. Long checks are marked ``slow`` and run with ``--run-slow``.
"""
import random
import time
from math import comb, factorial

import numpy as np
import pytest

from flipgraphs.coloring import (Budget, dsatur_coloring, exact_chromatic_number, gf_color_values,
                                 gf_coloring, layered_coloring, max_independent_set, verify_coloring)
from flipgraphs.gf import smallest_prime_power_at_least
from flipgraphs.graph import bfs_layers, check_equitable
from flipgraphs.matchings import (build_flip_graph, double_factorial_odd, matching_distance,
                                  type_partition)
from flipgraphs.signed import (SignedPermutation, _data, build_reversal_graph,
                               build_signed_reversal_graph, cell_partition, known_coloring,
                               parse_parity_coloring, sign_position_partition)
from flipgraphs.spectra import (chung_tobin_system, flip_hoffman_bounds, flip_spectrum,
                                graph_eigenvalues, sr_block_quotient, verify_spectrum_exact)

criterion = pytest.mark.criterion


# 1 -------------------------------------------------------------------------

@criterion(1)
def test_flip_graph_counts_and_regularity():
    start = time.monotonic()
    for n, size in zip(range(2, 7), [3, 15, 105, 945, 10395]):
        g = build_flip_graph(n).graph
        assert g.num_vertices == size == double_factorial_odd(n)
        assert g.degree() == n * (n - 1)
    assert time.monotonic() - start < 60


# 2 -------------------------------------------------------------------------

@criterion(2)
def test_k6_flip_graph_strongly_regular():
    start = time.monotonic()
    a = build_flip_graph(3).graph.adjacency_matrix()
    common = a @ a
    adjacent = a.astype(bool)
    off = ~np.eye(15, dtype=bool)
    assert a.shape == (15, 15) and set(a.sum(axis=1).tolist()) == {6}
    assert set(common[adjacent].tolist()) == {1}
    assert set(common[off & ~adjacent].tolist()) == {3}
    assert time.monotonic() - start < 1


# 3 -------------------------------------------------------------------------

@criterion(3)
@pytest.mark.parametrize("n", [2, 3, 4])
def test_spectrum_exact(n):
    start = time.monotonic()
    report = verify_spectrum_exact(build_flip_graph(n).graph, flip_spectrum(n))
    assert report.verified
    assert time.monotonic() - start < 120


@criterion(3)
def test_spectrum_identities_up_to_ten():
    for n in range(2, 11):
        spec = flip_spectrum(n)
        assert sum(e.multiplicity for e in spec) == double_factorial_odd(n)
        assert min(e.eigenvalue for e in spec) == -comb(n, 2)


@criterion(3)
@pytest.mark.slow
def test_spectrum_exact_n5():
    start = time.monotonic()
    assert verify_spectrum_exact(build_flip_graph(5).graph, flip_spectrum(5)).verified
    assert time.monotonic() - start < 3600


# 4 -------------------------------------------------------------------------

@criterion(4)
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_type_partition_equitable(n):
    fg = build_flip_graph(n)
    b = check_equitable(fg.graph, type_partition(fg))
    assert (b.sum(axis=1) == n * (n - 1)).all()


QUOTIENT_ORDER = [(1, 1, 1, 1, 1), (2, 1, 1, 1), (2, 2, 1), (3, 1, 1), (4, 1), (3, 2), (5,)]
QUOTIENT_OFF_DIAGONAL = {
    ((1, 1, 1, 1, 1), (2, 1, 1, 1)): 20, ((2, 1, 1, 1), (1, 1, 1, 1, 1)): 1,
    ((2, 1, 1, 1), (2, 2, 1)): 6, ((2, 2, 1), (2, 1, 1, 1)): 2,
    ((2, 1, 1, 1), (3, 1, 1)): 12, ((3, 1, 1), (2, 1, 1, 1)): 3,
    ((3, 1, 1), (4, 1)): 12, ((4, 1), (3, 1, 1)): 4,
    ((2, 2, 1), (4, 1)): 8, ((4, 1), (2, 2, 1)): 2,
    ((3, 1, 1), (3, 2)): 2, ((3, 2), (3, 1, 1)): 1,
    ((2, 2, 1), (3, 2)): 8, ((3, 2), (2, 2, 1)): 3,
    ((3, 2), (5,)): 12, ((5,), (3, 2)): 5,
    ((4, 1), (5,)): 8, ((5,), (4, 1)): 5,
}
QUOTIENT_DIAGONAL = [0, 1, 2, 3, 6, 4, 10]


@criterion(4)
def test_type_quotient_n5_values():
    fg = build_flip_graph(5)
    p = type_partition(fg)
    b = check_equitable(fg.graph, p)
    pos = {name: i for i, name in enumerate(p.names)}
    got = np.array([[b[pos[r], pos[c]] for c in QUOTIENT_ORDER] for r in QUOTIENT_ORDER])
    expected = np.zeros((7, 7), dtype=np.int64)
    for (r, c), v in QUOTIENT_OFF_DIAGONAL.items():
        expected[QUOTIENT_ORDER.index(r), QUOTIENT_ORDER.index(c)] = v
    np.fill_diagonal(expected, QUOTIENT_DIAGONAL)
    assert np.array_equal(got, expected), got
    assert [len(p.cells[pos[t]]) for t in QUOTIENT_ORDER] == [1, 20, 60, 80, 240, 160, 384]


# 5 -------------------------------------------------------------------------

@criterion(5)
@pytest.mark.parametrize("n,q", list(zip(range(2, 7), [5, 7, 9, 11, 13])))
def test_gf_coloring(n, q):
    fg = build_flip_graph(n)
    spec, _ = gf_color_values(fg)
    assert spec.q == q == smallest_prime_power_at_least(2 * n + 1).q
    c = gf_coloring(n, fg)
    assert verify_coloring(fg.graph, c)
    assert c.colors_used <= q


@criterion(5)
@pytest.mark.slow
def test_gf_coloring_prime_power_field():
    fg = build_flip_graph(7)
    spec, _ = gf_color_values(fg)
    assert (spec.p, spec.e) == (2, 4)
    c = gf_coloring(7, fg)
    assert fg.graph.num_vertices == 135135
    assert verify_coloring(fg.graph, c) and c.colors_used <= 16


# 6 -------------------------------------------------------------------------

@criterion(6)
@pytest.mark.parametrize("n,chi,seconds", [(2, 3, 1), (3, 4, 10), (4, 5, 600)])
def test_exact_chromatic_numbers(n, chi, seconds):
    g = build_flip_graph(n).graph
    res = exact_chromatic_number(g, Budget(seconds=seconds))
    assert res.exact, f"bracket [{res.lower}, {res.upper}] after {res.seconds:.1f}s"
    assert res.value == chi
    assert verify_coloring(g, res.certificate) and res.certificate.colors_used == chi


# 7 -------------------------------------------------------------------------

@criterion(7)
def test_independence_number_k8():
    g = build_flip_graph(4).graph
    res = max_independent_set(g, Budget(seconds=1800))
    assert res.exact and res.value == 28
    s = set(res.certificate)
    assert len(s) == 28 and not any(u in s and v in s for u, v in g.edges().tolist())


@criterion(7)
@pytest.mark.parametrize("n", range(2, 7))
def test_hoffman_bounds(n):
    hb = flip_hoffman_bounds(n)
    assert hb.independence == double_factorial_odd(n) // 3
    assert hb.chromatic == 3


# 8 -------------------------------------------------------------------------

@criterion(8)
@pytest.mark.parametrize("k", range(1, 7))
def test_sr_sizes(k):
    g = build_signed_reversal_graph(k).graph
    assert g.num_vertices == 2 ** k * factorial(k)
    assert g.degree() == comb(k + 1, 2)


@criterion(8)
def test_sr2_is_cube():
    sr = build_signed_reversal_graph(2)
    g = sr.graph
    assert g.num_vertices == 8 and g.degree() == 3
    profiles = set()
    for v in range(8):
        dist = bfs_layers(g, v).dist
        profiles.add(tuple(sorted(dist)))
        # bipartite: no edge inside a distance layer
        assert all(dist[a] != dist[b] for a, b in g.edges().tolist())
    assert profiles == {(0, 1, 1, 1, 2, 2, 2, 3)}
    # the two cells look alike: both induce a 4-cycle and are joined by a perfect matching
    b = check_equitable(g, cell_partition(2))
    assert b.tolist() == [[2, 1], [1, 2]]


@criterion(8)
@pytest.mark.parametrize("k", range(1, 6))
def test_cell_quotient(k):
    b = check_equitable(build_signed_reversal_graph(k).graph, cell_partition(k))
    expected = k * np.eye(factorial(k), dtype=np.int64) + build_reversal_graph(k).adjacency_matrix()
    assert np.array_equal(b, expected)


# 9 -------------------------------------------------------------------------

@criterion(9)
def test_sr3_cell_scheme_and_odd_cycle():
    sr = build_signed_reversal_graph(3)
    c = known_coloring(3)
    assert verify_coloring(sr.graph, c) and c.colors_used == 3
    cycle = ["1+2+3+", "1+2+3-", "1+2-3-", "1-2-3-", "2+1+3-", "2+3+1-", "3-2-1-"]
    idx = [sr.index_of(SignedPermutation.parse(t)) for t in cycle]
    assert len(set(idx)) == 7
    assert all(sr.graph.has_edge(a, b) for a, b in zip(idx, idx[1:] + idx[:1]))


@criterion(9)
def test_sr5_fixture():
    tokens = parse_parity_coloring(_data("sr5_coloring.txt"))
    assert len(tokens) == 240
    g = build_signed_reversal_graph(5).graph
    c = known_coloring(5)
    assert len(c) == g.num_vertices == 3840
    assert verify_coloring(g, c) and c.colors_used == 4


@criterion(9)
def test_sr3_exact():
    res = exact_chromatic_number(build_signed_reversal_graph(3).graph, Budget(seconds=60))
    assert res.exact and res.value == 3


@criterion(9)
@pytest.mark.slow
def test_sr4_not_three_colourable():
    g = build_signed_reversal_graph(4).graph
    res = exact_chromatic_number(g, Budget(seconds=7200))
    assert res.exact, f"bracket [{res.lower}, {res.upper}]"
    assert res.value == 4
    assert verify_coloring(g, res.certificate)


# 10 ------------------------------------------------------------------------

@criterion(10)
@pytest.mark.parametrize("n,bound", [(4, 5), (5, 7)])
def test_layered_coloring(n, bound):
    fg = build_flip_graph(n)
    c = layered_coloring(n, fg=fg)
    assert verify_coloring(fg.graph, c)
    assert c.colors_used <= bound


# 11 ------------------------------------------------------------------------

@criterion(11)
@pytest.mark.parametrize("n", range(1, 9))
def test_chung_tobin_formula(n):
    for x in (comb(n, 2), comb(n + 1, 2)):
        ct = chung_tobin_system(n, x)
        numeric = np.sort(np.linalg.eigvals(ct.matrix).real)
        assert np.max(np.abs(numeric - np.sort(ct.formula_eigenvalues()))) < 1e-9


@criterion(11)
@pytest.mark.parametrize("n", range(1, 6))
def test_sign_position_quotient(n):
    b = check_equitable(build_signed_reversal_graph(n).graph, sign_position_partition(n))
    assert np.array_equal(b, sr_block_quotient(n))


@criterion(11)
@pytest.mark.parametrize("n", range(1, 5))
def test_block_eigenvalues_in_sr_spectrum(n):
    ev = graph_eigenvalues(build_signed_reversal_graph(n).graph)
    ct = chung_tobin_system(n, comb(n + 1, 2))
    dp = np.diag(ct.D)
    for m in (dp + ct.X, dp - ct.X):
        for x in np.linalg.eigvals(m).real:
            assert np.min(np.abs(ev - x)) < 1e-6


# 12 ------------------------------------------------------------------------

@criterion(12)
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_distance_formula_against_bfs(n):
    fg = build_flip_graph(n)
    rng = random.Random(1000 + n)
    N = fg.graph.num_vertices
    for _ in range(500):
        s, t = rng.randrange(N), rng.randrange(N)
        assert matching_distance(fg.matching(s), fg.matching(t)) == bfs_layers(fg.graph, s).dist[t]


@criterion(12)
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_identity_eccentricity(n):
    fg = build_flip_graph(n)
    assert bfs_layers(fg.graph, fg.identity_index).eccentricity() == n - 1


@criterion(12)
@pytest.mark.parametrize("n", [3, 4])
def test_geodesic_counts_at_max_distance(n):
    g = build_flip_graph(n).graph
    for s in range(g.num_vertices):
        r = bfs_layers(g, s)
        far = [v for v, d in enumerate(r.dist) if d == n - 1]
        assert far and all(r.count[v] == n ** (n - 2) for v in far)


# 13 ------------------------------------------------------------------------

@criterion(13)
@pytest.mark.parametrize("n", [3, 4])
def test_second_eigenvalue_probe(n):
    ev = graph_eigenvalues(build_signed_reversal_graph(n).graph)
    distinct = np.unique(np.round(ev, 8))[::-1]
    print(f"SR_{n}: second-largest eigenvalue {distinct[1]:.6f}, C(n,2) = {comb(n, 2)}")
    assert abs(distinct[1] - comb(n, 2)) < 1e-6
