"""Perfect matchings of K_2n and their flip graph.

Vertex ``2i`` stands for the symbol ``i+`` and ``2i + 1`` for ``i-``, so the
sign of a vertex flips with ``v ^ 1`` and the identity matching pairs ``2i``
with ``2i + 1``.

Matchings are enumerated by pairing the smallest unmatched vertex with each
larger unmatched vertex in turn. That order is exactly the lexicographic order
of the partner arrays, so a matching's rank is a binary search over packed
partner keys.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from math import comb, prod
from typing import Iterable, Sequence

import numpy as np

from .graph import CellPartition, Graph, induced_subgraph, connected_components

MAX_N = 8
DEFAULT_MEMORY_BUDGET = 2 << 30  # bytes


class MemoryBudgetError(MemoryError):
    pass


def double_factorial_odd(n: int) -> int:
    """``(2n-1)!!``, the number of perfect matchings of ``K_2n``."""
    return prod(range(1, 2 * n, 2))


def symbol_str(v: int) -> str:
    return f"{v >> 1}{'-' if v & 1 else '+'}"


@dataclass(frozen=True)
class PerfectMatching:
    """Fixed-point-free involution on ``0..2n-1`` stored as a partner tuple."""

    partner: tuple[int, ...]

    def __post_init__(self):
        p = self.partner
        m = len(p)
        if m % 2 or m == 0:
            raise ValueError("a perfect matching needs a positive even number of vertices")
        for v, w in enumerate(p):
            if not 0 <= w < m or w == v or p[w] != v:
                raise ValueError(f"not a perfect matching at vertex {v}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]]) -> "PerfectMatching":
        pairs = [tuple(e) for e in pairs]
        partner = [-1] * (2 * len(pairs))
        for a, b in pairs:
            if not (0 <= a < len(partner) and 0 <= b < len(partner)) or partner[a] >= 0 or partner[b] >= 0:
                raise ValueError(f"bad pair {a}-{b}")
            partner[a], partner[b] = b, a
        return cls(tuple(partner))

    @classmethod
    def identity(cls, n: int) -> "PerfectMatching":
        return cls(tuple(v ^ 1 for v in range(2 * n)))

    @classmethod
    def parse(cls, text: str) -> "PerfectMatching":
        """Inverse of :meth:`__str__`: ``"0-3,1-2"``."""
        pairs = []
        for item in text.strip().split(","):
            a, _, b = item.partition("-")
            pairs.append((int(a), int(b)))
        return cls.from_pairs(pairs)

    @property
    def n(self) -> int:
        return len(self.partner) // 2

    def pairs(self) -> list[tuple[int, int]]:
        return [(v, w) for v, w in enumerate(self.partner) if v < w]

    def __str__(self) -> str:
        return ",".join(f"{a}-{b}" for a, b in self.pairs())

    def with_pairs(self, remove: Sequence[tuple[int, int]], add: Sequence[tuple[int, int]]) -> "PerfectMatching":
        p = list(self.partner)
        for a, b in remove:
            assert p[a] == b
        for a, b in add:
            p[a], p[b] = b, a
        return PerfectMatching(tuple(p))


def matching_array(n: int) -> np.ndarray:
    """All perfect matchings of ``K_2n`` as an ``((2n-1)!!, 2n)`` partner array, in rank order."""
    if n < 1:
        raise ValueError("n must be positive")
    rows = np.array([[1, 0]], dtype=np.int8)
    for m in range(2, n + 1):
        size = 2 * m
        blocks = []
        for p in range(1, size):
            rest = np.array([v for v in range(1, size) if v != p], dtype=np.int8)
            block = np.empty((len(rows), size), dtype=np.int8)
            block[:, 0] = p
            block[:, p] = 0
            block[:, rest] = rest[rows]
            blocks.append(block)
        rows = np.concatenate(blocks)
    return rows


def _pack(partners: np.ndarray) -> np.ndarray:
    """Big-endian 4-bit packing of partner rows; numeric order equals lexicographic order."""
    keys = np.zeros(len(partners), dtype=np.uint64)
    for col in range(partners.shape[1]):
        keys = (keys << np.uint64(4)) | partners[:, col].astype(np.uint64)
    return keys


def enumerate_perfect_matchings(n: int) -> list[PerfectMatching]:
    """All matchings of ``K_2n`` in rank order; index 0 is ``{0-1, 2-3, ...}``."""
    check_budget(n)
    return [PerfectMatching(tuple(r)) for r in matching_array(n).tolist()]


def estimate_flip_graph_bytes(n: int) -> int:
    count = double_factorial_odd(n)
    deg = n * (n - 1)
    # partner rows, packed keys, neighbour table (int32) plus one sorted copy
    return count * (2 * n + 8 + 8 * max(deg, 1))


def check_budget(n: int, budget: int = DEFAULT_MEMORY_BUDGET) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    need = estimate_flip_graph_bytes(n)
    if n > MAX_N or need > budget:
        raise MemoryBudgetError(
            f"flip graph for n={n} needs about {need / 2**20:.0f} MiB "
            f"(budget {budget / 2**20:.0f} MiB, hard limit n <= {MAX_N})"
        )


def flip_neighbors(m: PerfectMatching) -> list[PerfectMatching]:
    """The ``n(n-1)`` matchings one flip away, two per pair of matching edges."""
    pairs = m.pairs()
    out = []
    for (a, b), (c, d) in itertools.combinations(pairs, 2):
        out.append(m.with_pairs([(a, b), (c, d)], [(a, c), (b, d)]))
        out.append(m.with_pairs([(a, b), (c, d)], [(a, d), (b, c)]))
    return out


def _flip_columns(partners: np.ndarray):
    """Yield the partner arrays of every flip, one column of neighbours at a time."""
    n = partners.shape[1] // 2
    rows = np.arange(len(partners))
    # edges of each matching sorted by smaller endpoint
    small = np.sort(np.nonzero(partners > np.arange(2 * n))[1].reshape(len(partners), n), axis=1)
    for i, j in itertools.combinations(range(n), 2):
        a = small[:, i]
        c = small[:, j]
        b = partners[rows, a]
        d = partners[rows, c]
        for x, y in ((c, d), (d, c)):
            new = partners.copy()
            # a-x and b-y
            new[rows, a] = x
            new[rows, x] = a
            new[rows, b] = y
            new[rows, y] = b
            yield new


@dataclass(frozen=True, eq=False)
class FlipGraph:
    """The flip graph together with its rank-ordered matchings."""

    n: int
    graph: Graph
    partners: np.ndarray  # (N, 2n) int8, row r is the matching of rank r
    keys: np.ndarray

    def matching(self, index: int) -> PerfectMatching:
        return PerfectMatching(tuple(self.partners[index].tolist()))

    @cached_property
    def matchings(self) -> list[PerfectMatching]:
        return [PerfectMatching(tuple(r)) for r in self.partners.tolist()]

    def rank(self, m: PerfectMatching) -> int:
        if m.n != self.n:
            raise ValueError("matching size does not match the graph")
        key = _pack(np.array([m.partner], dtype=np.int8))
        return int(np.searchsorted(self.keys, key)[0])

    def ranks(self, partners: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.keys, _pack(partners)).astype(np.int32)

    @property
    def identity_index(self) -> int:
        return self.rank(PerfectMatching.identity(self.n))

    @cached_property
    def types(self) -> list[tuple[int, ...]]:
        return [type_of(m) for m in self.matchings]

    @cached_property
    def labels(self) -> list["MatchingLabel"]:
        return [label_of(m) for m in self.matchings]


def build_flip_graph(n: int, *, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> FlipGraph:
    check_budget(n, memory_budget)
    partners = matching_array(n)
    keys = _pack(partners)
    deg = n * (n - 1)
    if deg == 0:
        g = Graph(np.zeros(2, dtype=np.int64), np.zeros(0, dtype=np.int32))
        return FlipGraph(n, g, partners, keys)
    table = np.empty((len(partners), deg), dtype=np.int32)
    for col, new in enumerate(_flip_columns(partners)):
        table[:, col] = np.searchsorted(keys, _pack(new))
    g = Graph.from_regular_rows(table, check=n <= 6)
    return FlipGraph(n, g, partners, keys)


def _cycles(partner: Sequence[int]) -> list[list[int]]:
    """Cycles of ``M0 ∪ M`` as vertex walks starting at ``s+``, ``s`` ascending."""
    seen = [False] * len(partner)
    out = []
    for s in range(0, len(partner), 2):
        if seen[s]:
            continue
        walk = []
        cur = s
        while True:
            seen[cur] = seen[cur ^ 1] = True
            walk.append(cur)
            cur = partner[cur] ^ 1  # blue edge then red edge
            if cur == s:
                break
        out.append(walk)
    return out


def type_of(m: PerfectMatching) -> tuple[int, ...]:
    """Half-lengths of the cycles of ``M0 ∪ M`` in descending order."""
    return tuple(sorted((len(c) for c in _cycles(m.partner)), reverse=True))


@dataclass(frozen=True)
class MatchingLabel:
    """Per-cycle signed symbol sequences; ``starts[i]`` is the symbol cycle ``i`` starts from.

    Segment entries are vertex indices (``2i`` for ``i+``, ``2i+1`` for ``i-``).
    """

    starts: tuple[int, ...]
    segments: tuple[tuple[int, ...], ...]

    def __str__(self) -> str:
        return "".join("(" + "".join(symbol_str(v) for v in seg) + ")" for seg in self.segments)

    def type(self) -> tuple[int, ...]:
        return tuple(sorted((len(s) + 1 for s in self.segments), reverse=True))

    def signed_segments(self) -> list[tuple[int, ...]]:
        """Each segment as a signed permutation of ``1..len`` (symbols ranked within the cycle)."""
        out = []
        for seg in self.segments:
            order = sorted(v >> 1 for v in seg)
            rank = {s: i + 1 for i, s in enumerate(order)}
            out.append(tuple(-rank[v >> 1] if v & 1 else rank[v >> 1] for v in seg))
        return out


def label_of(m: PerfectMatching) -> MatchingLabel:
    """Read the vertices that start each blue edge (after the first) along every cycle."""
    cycles = _cycles(m.partner)
    return MatchingLabel(tuple(c[0] >> 1 for c in cycles), tuple(tuple(c[1:]) for c in cycles))


def matching_distance(m1: PerfectMatching, m2: PerfectMatching) -> int:
    """Flip distance: ``n`` minus the number of components of ``M1 ∪ M2``."""
    if m1.n != m2.n:
        raise ValueError("matchings have different sizes")
    p1, p2 = m1.partner, m2.partner
    seen = [False] * len(p1)
    comps = 0
    for s in range(len(p1)):
        if seen[s]:
            continue
        comps += 1
        cur = s
        while not seen[cur]:
            seen[cur] = True
            nxt = p1[cur]
            seen[nxt] = True
            cur = p2[nxt]
    return m1.n - comps


def partitions_desc(n: int) -> list[tuple[int, ...]]:
    """Partitions of ``n`` in descending lexicographic order."""
    out: list[tuple[int, ...]] = []

    def rec(rest: int, cap: int, acc: list[int]):
        if rest == 0:
            out.append(tuple(acc))
            return
        for part in range(min(rest, cap), 0, -1):
            acc.append(part)
            rec(rest - part, part, acc)
            acc.pop()

    rec(n, n, [])
    return out


def type_partition(fg: FlipGraph) -> CellPartition:
    """One cell per matching type, cells in ascending lexicographic order, so ``(1^n)`` comes first."""
    types = fg.types
    order = partitions_desc(fg.n)[::-1]  # (1^n) first
    return CellPartition.from_labels(types, order=order)


def layer_of(fg: FlipGraph) -> list[int]:
    """Number of cycles of ``M0 ∪ M`` for each vertex."""
    return [len(t) for t in fg.types]


class NotIsomorphism(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def label_isomorphism_to_sr(fg: FlipGraph) -> dict[int, int]:
    """Map type-(n) vertices to ``SR_{n-1}`` vertices through their labels, and verify it.

    Returns ``{flip vertex: SR vertex}``. Raises :class:`NotIsomorphism` with a
    witness pair if the map is not bijective or does not preserve adjacency.
    """
    from .signed import build_signed_reversal_graph

    n = fg.n
    if n < 2:
        raise ValueError("n must be at least 2")
    sr = build_signed_reversal_graph(n - 1)
    full = (n,)
    verts = [v for v, t in enumerate(fg.types) if t == full]
    mapping = {}
    for v in verts:
        (seg,) = fg.labels[v].segments
        entries = tuple(-(x >> 1) if x & 1 else x >> 1 for x in seg)
        mapping[v] = sr.index_of(entries)
    _check_isomorphism(fg.graph, verts, mapping, sr.graph)
    return mapping


def _check_isomorphism(g: Graph, verts: list[int], mapping: dict[int, int], h: Graph) -> None:
    if len(set(mapping.values())) != len(verts) or len(verts) != h.num_vertices:
        raise NotIsomorphism("label map is not a bijection")
    sub = induced_subgraph(g, verts)
    for u, w in sub.graph.edges().tolist():
        a, b = int(sub.to_parent[u]), int(sub.to_parent[w])
        if not h.has_edge(mapping[a], mapping[b]):
            raise NotIsomorphism(f"edge {a}-{b} maps to a non-edge", (a, b))
    if sub.graph.edge_count != h.edge_count:
        # every image edge is an edge and the map is bijective, so counts must agree
        raise NotIsomorphism("edge counts differ")


def sr_sizes(parts: Sequence[int]) -> int:
    """Vertex count of the product of ``SR_{p-1}`` over the parts."""
    return prod(2 ** (p - 1) * _fact(p - 1) for p in parts)


def _fact(k: int) -> int:
    return prod(range(1, k + 1))


def product_degree(parts: Sequence[int]) -> int:
    return sum(comb(p, 2) for p in parts)


def type_components(fg: FlipGraph, lam: tuple[int, ...]) -> list[list[int]]:
    """Connected components (as flip-graph vertex lists) of the subgraph induced by type ``lam``."""
    verts = [v for v, t in enumerate(fg.types) if t == lam]
    sub = induced_subgraph(fg.graph, verts)
    return [[int(sub.to_parent[i]) for i in comp] for comp in connected_components(sub.graph)]


def component_product_map(fg: FlipGraph, component: Sequence[int]):
    """Map a same-type component onto a box product of signed reversal graphs via labels.

    Factors follow the label's cycle order. Returns ``(factor_degrees, coords)``
    where ``coords[v]`` is the tuple of ``SR`` vertex indices of ``v``.
    """
    from .signed import build_signed_reversal_graph

    first = fg.labels[component[0]]
    degrees = tuple(len(s) for s in first.segments)
    factors = {k: build_signed_reversal_graph(k) for k in set(degrees)}
    coords = {}
    for v in component:
        lab = fg.labels[v]
        if lab.starts != first.starts or tuple(len(s) for s in lab.segments) != degrees:
            raise NotIsomorphism("component mixes cycle structures", (component[0], v))
        coords[v] = tuple(factors[k].index_of(sp) for k, sp in zip(degrees, lab.signed_segments()))
    return degrees, coords


def verify_component_product(fg: FlipGraph, component: Sequence[int]) -> None:
    """Check that the label map of :func:`component_product_map` is a graph isomorphism."""
    from .signed import build_signed_reversal_graph
    from .graph import box_product

    degrees, coords = component_product_map(fg, component)
    prod_graph = None
    sizes = []
    for k in degrees:
        f = build_signed_reversal_graph(k).graph
        sizes.append(f.num_vertices)
        prod_graph = f if prod_graph is None else box_product(prod_graph, f)
    mapping = {}
    for v, c in coords.items():
        idx = 0
        for x, s in zip(c, sizes):
            idx = idx * s + x
        mapping[v] = idx
    _check_isomorphism(fg.graph, list(component), mapping, prod_graph)
