"""Immutable undirected graphs and the structural routines used throughout the package.

Graphs are stored in CSR form (``indptr``/``indices``) with every adjacency row
sorted, so that large flip graphs fit in memory and numpy can do the bulk work.
Pure-Python algorithms use the cached :attr:`Graph.adjacency` lists instead.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

INF = math.inf


class NotEquitable(ValueError):
    """Raised when a partition is not equitable.

    ``witness`` is ``(u, v, cell)``: ``u`` and ``v`` share a cell but have a
    different number of neighbours in ``cell``.
    """

    def __init__(self, witness: tuple[int, int, int], counts: tuple[int, int]):
        u, v, cell = witness
        super().__init__(
            f"vertices {u} and {v} share a cell but have {counts[0]} and "
            f"{counts[1]} neighbours in cell {cell}"
        )
        self.witness = witness
        self.counts = counts


class Graph:
    """Simple undirected graph on vertices ``0..num_vertices-1``."""

    __slots__ = ("num_vertices", "indptr", "indices", "edge_count", "_adj")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, *, check: bool = True):
        indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.num_vertices = len(indptr) - 1
        if check:
            _check_csr(indptr, indices)
        indptr.flags.writeable = False
        indices.flags.writeable = False
        self.indptr = indptr
        self.indices = indices
        self.edge_count = len(indices) // 2
        self._adj = None

    @classmethod
    def from_regular_rows(cls, rows: np.ndarray, *, check: bool = True) -> "Graph":
        """Build from an ``(N, d)`` array of neighbour indices (rows need not be sorted)."""
        rows = np.sort(np.asarray(rows), axis=1)
        n, d = rows.shape
        indptr = np.arange(0, n * d + 1, d, dtype=np.int64)
        return cls(indptr, rows.reshape(-1), check=check)

    def __repr__(self) -> str:
        return f"Graph(num_vertices={self.num_vertices}, edge_count={self.edge_count})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.indptr, other.indptr) and np.array_equal(self.indices, other.indices)

    __hash__ = None

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @property
    def adjacency(self) -> list[list[int]]:
        """Per-vertex sorted neighbour lists (built once, then cached)."""
        if self._adj is None:
            flat = self.indices.tolist()
            bounds = self.indptr.tolist()
            self._adj = [flat[bounds[v]:bounds[v + 1]] for v in range(self.num_vertices)]
        return self._adj

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self) -> int:
        """The common degree of a regular graph; ``ValueError`` otherwise."""
        deg = self.degrees()
        if len(deg) == 0:
            return 0
        if deg.min() != deg.max():
            raise ValueError("graph is not regular")
        return int(deg[0])

    def is_regular(self) -> bool:
        deg = self.degrees()
        return len(deg) == 0 or deg.min() == deg.max()

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return bool(i < len(row) and row[i] == v)

    def edges(self) -> np.ndarray:
        """``(edge_count, 2)`` array of edges ``u < v``, sorted lexicographically."""
        src = np.repeat(np.arange(self.num_vertices, dtype=np.int32), self.degrees())
        mask = src < self.indices
        return np.stack([src[mask], self.indices[mask]], axis=1)

    def edge_sources(self) -> np.ndarray:
        """Source vertex of each entry of :attr:`indices`."""
        return np.repeat(np.arange(self.num_vertices, dtype=np.int32), self.degrees())

    def to_scipy(self) -> csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.num_vertices,) * 2)

    def adjacency_matrix(self, dtype=np.int64) -> np.ndarray:
        a = np.zeros((self.num_vertices, self.num_vertices), dtype=dtype)
        a[self.edge_sources(), self.indices] = 1
        return a


def _check_csr(indptr: np.ndarray, indices: np.ndarray) -> None:
    n = len(indptr) - 1
    if n < 0 or indptr[0] != 0 or indptr[-1] != len(indices) or np.any(np.diff(indptr) < 0):
        raise ValueError("malformed indptr")
    if len(indices) == 0:
        return
    if indices.min() < 0 or indices.max() >= n:
        raise ValueError("neighbour index out of range")
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    if np.any(src == indices):
        raise ValueError("self-loop in adjacency")
    # strictly increasing inside each row: sorted and duplicate-free
    key = src * n + indices
    if np.any(np.diff(key) <= 0):
        raise ValueError("adjacency rows must be sorted without duplicates")
    if len(indices) % 2:
        raise ValueError("adjacency is not symmetric")
    rev = np.sort(indices.astype(np.int64) * n + src)
    if not np.array_equal(rev, key):
        raise ValueError("adjacency is not symmetric")


def build_graph(num_vertices: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Graph on ``num_vertices`` vertices from unordered pairs; duplicates are merged."""
    if num_vertices < 0:
        raise ValueError("num_vertices must be nonnegative")
    e = np.array([tuple(p) for p in edges], dtype=np.int64).reshape(-1, 2)
    if e.size:
        if e.min() < 0 or e.max() >= num_vertices:
            bad = e[(e < 0).any(axis=1) | (e >= num_vertices).any(axis=1)][0]
            raise ValueError(f"edge {tuple(bad)} has an endpoint out of range")
        loops = e[:, 0] == e[:, 1]
        if loops.any():
            raise ValueError(f"self-loop at vertex {e[loops][0, 0]}")
    both = np.concatenate([e, e[:, ::-1]])
    keys = np.unique(both[:, 0] * max(num_vertices, 1) + both[:, 1])
    src = keys // max(num_vertices, 1)
    dst = keys % max(num_vertices, 1)
    indptr = np.zeros(num_vertices + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    return Graph(np.cumsum(indptr), dst, check=True)


@dataclass(frozen=True)
class Subgraph:
    """An induced subgraph together with its vertex maps."""

    graph: Graph
    to_parent: np.ndarray  # new index -> original index
    from_parent: dict[int, int] = field(repr=False)  # original index -> new index


def induced_subgraph(g: Graph, vs: Iterable[int]) -> Subgraph:
    """Subgraph induced by ``vs``; new indices follow the increasing order of ``vs``."""
    verts = np.unique(np.fromiter(vs, dtype=np.int64))
    if len(verts) and (verts[0] < 0 or verts[-1] >= g.num_vertices):
        raise ValueError("vertex out of range")
    new_of = np.full(g.num_vertices, -1, dtype=np.int64)
    new_of[verts] = np.arange(len(verts))
    src = g.edge_sources()
    keep = (new_of[src] >= 0) & (new_of[g.indices] >= 0)
    s, d = new_of[src[keep]], new_of[g.indices[keep]]
    indptr = np.zeros(len(verts) + 1, dtype=np.int64)
    np.add.at(indptr, s + 1, 1)
    sub = Graph(np.cumsum(indptr), d, check=False)
    return Subgraph(sub, verts, {int(v): i for i, v in enumerate(verts.tolist())})


def connected_components(g: Graph) -> list[list[int]]:
    """Vertex sets of the components, each sorted, ordered by smallest vertex."""
    if g.num_vertices == 0:
        return []
    _, labels = _cc(g.to_scipy(), directed=False)
    # relabel so that component order follows the first vertex seen
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    labels = rank[labels]
    idx = np.argsort(labels, kind="stable")
    splits = np.cumsum(np.bincount(labels))[:-1]
    return [part.tolist() for part in np.split(idx, splits)]


def box_product(g: Graph, h: Graph) -> Graph:
    """Cartesian product; vertex ``(a, b)`` gets index ``a * |V(h)| + b``."""
    ng, nh = g.num_vertices, h.num_vertices
    eg, eh = g.edges().astype(np.int64), h.edges().astype(np.int64)
    a = np.arange(ng, dtype=np.int64)
    b = np.arange(nh, dtype=np.int64)
    # copies of h inside each a, and copies of g for each b
    e1 = (a[:, None, None] * nh + eh[None, :, :]).reshape(-1, 2)
    e2 = (eg[None, :, :] * nh + b[:, None, None]).reshape(-1, 2)
    return build_graph(ng * nh, np.concatenate([e1, e2]))


@dataclass
class BFSResult:
    """Distances (``INF`` when unreachable) and exact geodesic counts from one source."""

    source: int
    dist: list
    count: list[int]

    def eccentricity(self) -> float:
        return max(self.dist)

    def layers(self) -> list[list[int]]:
        out: list[list[int]] = []
        for v, d in enumerate(self.dist):
            if d == INF:
                continue
            while len(out) <= d:
                out.append([])
            out[d].append(v)
        return out


def bfs_layers(g: Graph, source: int) -> BFSResult:
    """Breadth-first distances and shortest-path counts from ``source``.

    Counts are Python integers, accumulated over the BFS DAG: a vertex's count is
    the sum of the counts of its neighbours one layer closer to the source.
    """
    if not 0 <= source < g.num_vertices:
        raise ValueError("source out of range")
    adj = g.adjacency
    dist: list = [INF] * g.num_vertices
    count = [0] * g.num_vertices
    dist[source], count[source] = 0, 1
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du, cu = dist[u], count[u]
        for w in adj[u]:
            if dist[w] == INF:
                dist[w] = du + 1
                queue.append(w)
            if dist[w] == du + 1:
                count[w] += cu
    return BFSResult(source, dist, count)


class CellPartition:
    """A partition of ``0..N-1`` into nonempty cells, kept in the given cell order."""

    __slots__ = ("cells", "cell_of", "names")

    def __init__(self, cells: Sequence[Sequence[int]], num_vertices: int | None = None,
                 names: Sequence | None = None):
        cells = [np.asarray(sorted(c), dtype=np.int64) for c in cells]
        total = sum(len(c) for c in cells)
        if num_vertices is None:
            num_vertices = total
        if any(len(c) == 0 for c in cells):
            raise ValueError("cells must be nonempty")
        cell_of = np.full(num_vertices, -1, dtype=np.int64)
        for i, c in enumerate(cells):
            if len(c) and (c[0] < 0 or c[-1] >= num_vertices):
                raise ValueError("cell vertex out of range")
            if np.any(cell_of[c] >= 0) or len(np.unique(c)) != len(c):
                raise ValueError("cells overlap")
            cell_of[c] = i
        if np.any(cell_of < 0):
            raise ValueError("cells do not cover all vertices")
        self.cells = cells
        self.cell_of = cell_of
        self.names = list(names) if names is not None else None

    @classmethod
    def from_labels(cls, labels: Sequence, order: Sequence | None = None) -> "CellPartition":
        """One cell per distinct label; cells ordered by ``order`` or by first occurrence."""
        labels = list(labels)
        if order is None:
            order = list(dict.fromkeys(labels))
        pos = {lab: i for i, lab in enumerate(order)}
        cells: list[list[int]] = [[] for _ in order]
        for v, lab in enumerate(labels):
            cells[pos[lab]].append(v)
        keep = [i for i, c in enumerate(cells) if c]
        return cls([cells[i] for i in keep], len(labels), [order[i] for i in keep])

    def __len__(self) -> int:
        return len(self.cells)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.cells]

    def same_as(self, other: "CellPartition") -> bool:
        """Equality as set partitions, ignoring cell order."""
        a = {tuple(c.tolist()) for c in self.cells}
        b = {tuple(c.tolist()) for c in other.cells}
        return a == b


def neighbor_counts(g: Graph, p: CellPartition) -> np.ndarray:
    """``(N, t)`` matrix: number of neighbours of each vertex in each cell."""
    counts = np.zeros((g.num_vertices, len(p)), dtype=np.int64)
    np.add.at(counts, (g.edge_sources(), p.cell_of[g.indices]), 1)
    return counts


def check_equitable(g: Graph, p: CellPartition) -> np.ndarray:
    """Quotient matrix ``B`` of an equitable partition, else :class:`NotEquitable`."""
    if len(p.cell_of) != g.num_vertices:
        raise ValueError("partition size does not match the graph")
    counts = neighbor_counts(g, p)
    quotient = np.zeros((len(p), len(p)), dtype=np.int64)
    for i, cell in enumerate(p.cells):
        rows = counts[cell]
        bad = np.nonzero((rows != rows[0]).any(axis=1))[0]
        if len(bad):
            v = int(cell[bad[0]])
            j = int(np.nonzero(rows[bad[0]] != rows[0])[0][0])
            raise NotEquitable((int(cell[0]), v, j), (int(rows[0, j]), int(counts[v, j])))
        quotient[i] = rows[0]
    return quotient


def equitable_refinement(g: Graph, p: CellPartition) -> CellPartition:
    """Coarsest equitable refinement of ``p`` (colour refinement).

    Cells are split by neighbour-count signatures until nothing changes. A split
    cell keeps its position and the new pieces are appended, ordered by smallest
    vertex, so an already-equitable partition comes back unchanged.
    """
    cells = [c.tolist() for c in p.cells]
    while True:
        cur = CellPartition(cells, g.num_vertices)
        counts = neighbor_counts(g, cur)
        new_cells: list[list[int]] = []
        extra: list[list[int]] = []
        for cell in cells:
            groups: dict[tuple, list[int]] = {}
            for v in cell:
                groups.setdefault(tuple(counts[v].tolist()), []).append(v)
            parts = sorted(groups.values(), key=lambda c: c[0])
            new_cells.append(parts[0])
            extra.extend(parts[1:])
        if not extra:
            return CellPartition(cells, g.num_vertices, p.names)
        cells = new_cells + extra


def write_edge_list(g: Graph, fh: TextIO) -> None:
    """Write ``p <N> <M>`` followed by ``e <u> <v>`` lines (0-indexed, ``u < v``)."""
    fh.write(f"p {g.num_vertices} {g.edge_count}\n")
    fh.writelines(f"e {u} {v}\n" for u, v in g.edges().tolist())


def read_edge_list(fh: TextIO) -> Graph:
    header = None
    edges = []
    for lineno, line in enumerate(fh, 1):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "p" and len(parts) == 3 and header is None:
            header = (int(parts[1]), int(parts[2]))
        elif parts[0] == "e" and len(parts) == 3:
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise ValueError(f"line {lineno}: cannot parse {line.rstrip()!r}")
    if header is None:
        raise ValueError("missing 'p <num_vertices> <num_edges>' header")
    g = build_graph(header[0], edges)
    if g.edge_count != header[1]:
        raise ValueError(f"header announces {header[1]} edges, found {g.edge_count}")
    return g
