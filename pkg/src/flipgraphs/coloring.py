"""Colourings of flip graphs and signed reversal graphs: constructions, heuristics and exact search."""
from __future__ import annotations

import heapq
import sys
import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence, TextIO

import numpy as np

from .gf import FieldSpec, smallest_prime_power_at_least
from .graph import Graph, connected_components, induced_subgraph
from .matchings import FlipGraph, build_flip_graph, component_product_map


@dataclass(frozen=True, eq=False)
class Coloring:
    """Colour per vertex, every colour in ``0..num_colors-1``."""

    colors: tuple[int, ...]
    num_colors: int

    def __post_init__(self):
        if any(c < 0 or c >= self.num_colors for c in self.colors):
            raise ValueError("colour out of range")

    @classmethod
    def from_labels(cls, labels) -> "Coloring":
        """Densely re-index arbitrary labels (ascending label order)."""
        uniq, inv = np.unique(np.asarray(labels), return_inverse=True)
        return cls(tuple(inv.tolist()), len(uniq))

    def __len__(self) -> int:
        return len(self.colors)

    def __eq__(self, other) -> bool:
        return isinstance(other, Coloring) and self.colors == other.colors and self.num_colors == other.num_colors

    @property
    def colors_used(self) -> int:
        return len(set(self.colors))

    def array(self) -> np.ndarray:
        return np.asarray(self.colors, dtype=np.int64)

    def write(self, fh: TextIO) -> None:
        fh.write(f"c {self.num_colors}\n")
        fh.writelines(f"{v} {c}\n" for v, c in enumerate(self.colors))

    @classmethod
    def read(cls, fh: TextIO) -> "Coloring":
        num = None
        pairs = {}
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "c" and len(parts) == 2 and num is None:
                num = int(parts[1])
            elif len(parts) == 2:
                v, c = int(parts[0]), int(parts[1])
                if v in pairs:
                    raise ValueError(f"line {lineno}: vertex {v} coloured twice")
                pairs[v] = c
            else:
                raise ValueError(f"line {lineno}: cannot parse {line.rstrip()!r}")
        if num is None:
            raise ValueError("missing 'c <num_colors>' header")
        if sorted(pairs) != list(range(len(pairs))):
            raise ValueError("coloured vertices are not 0..N-1")
        return cls(tuple(pairs[v] for v in range(len(pairs))), num)


@dataclass(frozen=True)
class ColoringCheck:
    ok: bool
    witness: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_coloring(g: Graph, c: Coloring) -> ColoringCheck:
    """Proper iff no edge is monochromatic; the first bad edge is the witness."""
    if len(c) != g.num_vertices:
        raise ValueError(f"colouring covers {len(c)} vertices, graph has {g.num_vertices}")
    col = c.array()
    src = g.edge_sources()
    bad = np.nonzero((col[src] == col[g.indices]) & (src < g.indices))[0]
    if len(bad):
        return ColoringCheck(False, (int(src[bad[0]]), int(g.indices[bad[0]])))
    return ColoringCheck(True)


def _assert_proper(g: Graph, c: Coloring) -> Coloring:
    check = verify_coloring(g, c)
    if not check:
        raise AssertionError(f"internal error: edge {check.witness} is monochromatic")
    return c


# ---------------------------------------------------------------------------
# constructions

def gf_color_values(fg: FlipGraph, field_spec: FieldSpec | None = None) -> tuple[FieldSpec, np.ndarray]:
    """Field codes of ``sum over matching edges {u, v} of s(u) s(v)`` with ``s(i)`` = the i-th element."""
    n = fg.n
    spec = field_spec or smallest_prime_power_at_least(2 * n + 1)
    if spec.q < 2 * n:
        raise ValueError("field too small for an injective vertex labelling")
    add, mul = spec.tables()
    partners = fg.partners.astype(np.int64)
    acc = np.zeros(len(partners), dtype=np.int64)
    for u in range(2 * n):
        v = partners[:, u]
        acc = np.where(v > u, add[acc, mul[u, v]], acc)
    return spec, acc


def gf_coloring(n: int, fg: FlipGraph | None = None) -> Coloring:
    """Colour each matching by a field-valued sum of products over its edges."""
    if n < 2:
        raise ValueError("n must be at least 2")
    fg = fg or build_flip_graph(n)
    _, values = gf_color_values(fg)
    return _assert_proper(fg.graph, Coloring.from_labels(values))


def box_product_coloring(cg: Coloring, ch: Coloring) -> Coloring:
    """Colour ``(a, b)`` (index ``a * |H| + b``) with ``(c(a) + c(b)) mod max(k_G, k_H)``."""
    m = max(cg.num_colors, ch.num_colors)
    a = cg.array()[:, None]
    b = ch.array()[None, :]
    return Coloring(tuple(((a + b) % m).reshape(-1).tolist()), m)


def _fold_box_colors(colors: Sequence[int], sizes: Sequence[int]) -> tuple[int, int]:
    # same arithmetic as repeated box_product_coloring, left to right
    acc, m = colors[0], sizes[0]
    for c, s in zip(colors[1:], sizes[1:]):
        m = max(m, s)
        acc = (acc + c) % m
    return acc, m


def layered_coloring(n: int, factor_colorings: Mapping[int, Coloring] | None = None,
                     fg: FlipGraph | None = None) -> Coloring:
    """Colour by cycle-count layers: odd layers share one palette, even layers another.

    ``factor_colorings[k]`` must be a proper colouring of ``SR_k`` for each
    ``k <= n-1``; the palettes have the sizes of the colourings of ``SR_{n-1}``
    and ``SR_{n-2}``. Each component of a layer is a box product of signed
    reversal graphs and is coloured through its labels.
    """
    from .signed import build_signed_reversal_graph

    if n < 3:
        raise ValueError("n must be at least 3")
    fg = fg or build_flip_graph(n)
    if factor_colorings is None:
        factor_colorings = default_sr_colorings(n - 1)
    for k in range(n):
        if k not in factor_colorings:
            raise ValueError(f"missing colouring of SR_{k}")
        fc = factor_colorings[k]
        sr = build_signed_reversal_graph(k)
        if not verify_coloring(sr.graph, fc):
            raise ValueError(f"colouring of SR_{k} is not proper")
    size_a = factor_colorings[n - 1].num_colors
    size_b = factor_colorings[n - 2].num_colors
    colors = np.full(fg.graph.num_vertices, -1, dtype=np.int64)
    layers = np.array([len(t) for t in fg.types])
    for layer in range(1, n + 1):
        verts = np.nonzero(layers == layer)[0]
        palette, offset = (size_a, 0) if layer % 2 else (size_b, size_a)
        sub = induced_subgraph(fg.graph, verts.tolist())
        for comp in connected_components(sub.graph):
            comp = [int(sub.to_parent[i]) for i in comp]
            degrees, coords = component_product_map(fg, comp)
            sizes = [factor_colorings[k].num_colors for k in degrees]
            if max(sizes) > palette:
                raise ValueError(f"layer {layer} needs {max(sizes)} colours, palette has {palette}")
            for v in comp:
                c, _ = _fold_box_colors([factor_colorings[k].colors[x] for k, x in zip(degrees, coords[v])], sizes)
                colors[v] = offset + c
    return _assert_proper(fg.graph, Coloring(tuple(colors.tolist()), size_a + size_b))


def default_sr_colorings(max_k: int) -> dict[int, Coloring]:
    """Small proper colourings of ``SR_0..SR_max_k`` (stored ones where available)."""
    from .signed import build_signed_reversal_graph, known_coloring, parity_coloring

    out = {}
    for k in range(max_k + 1):
        if k <= 2:
            out[k] = parity_coloring(k)
        elif k <= 5:
            out[k] = known_coloring(k)
        else:
            out[k] = dsatur_coloring(build_signed_reversal_graph(k).graph)
    return out


# ---------------------------------------------------------------------------
# heuristics and exact search

def dsatur_coloring(g: Graph, seed: int = 0) -> Coloring:
    """Greedy colouring by saturation degree, ties by degree then a seeded random key."""
    N = g.num_vertices
    if N == 0:
        return Coloring((), 0)
    adj = g.adjacency
    rng = np.random.default_rng(seed)
    tie = rng.permutation(N).tolist()
    deg = [len(a) for a in adj]
    seen = [0] * N  # bitmask of neighbour colours
    color = [-1] * N
    heap = [(0, -deg[v], tie[v], v) for v in range(N)]
    heapq.heapify(heap)
    while heap:
        negsat, _, _, v = heapq.heappop(heap)
        if color[v] >= 0 or -negsat != seen[v].bit_count():
            continue
        free = ~seen[v]
        c = (free & -free).bit_length() - 1
        color[v] = c
        bit = 1 << c
        for u in adj[v]:
            if color[u] < 0 and not seen[u] & bit:
                seen[u] |= bit
                heapq.heappush(heap, (-seen[u].bit_count(), -deg[u], tie[u], u))
    return _assert_proper(g, Coloring(tuple(color), max(color) + 1))


def greedy_clique(g: Graph) -> list[int]:
    """A maximal clique grown from each vertex in turn; the largest one found."""
    adj = [set(a) for a in g.adjacency]
    best: list[int] = []
    for start in range(g.num_vertices):
        clique = [start]
        cand = set(adj[start])
        while cand:
            v = max(cand, key=lambda u: (len(adj[u] & cand), -u))
            clique.append(v)
            cand &= adj[v]
        if len(clique) > len(best):
            best = clique
    return sorted(best)


@dataclass
class Budget:
    """Limits for exact searches; ``None`` means unlimited."""

    seconds: float | None = None
    nodes: int | None = None


class _OutOfBudget(Exception):
    pass


class _Clock:
    def __init__(self, budget: Budget | None):
        budget = budget or Budget()
        self.deadline = None if budget.seconds is None else time.monotonic() + budget.seconds
        self.node_limit = budget.nodes
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise _OutOfBudget
        if self.deadline is not None and self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            raise _OutOfBudget


@dataclass
class SearchResult:
    """Outcome of a budgeted exact search: exact when ``lower == upper``."""

    lower: int
    upper: int
    certificate: object
    nodes: int = 0
    seconds: float = 0.0
    log: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    @property
    def value(self) -> int:
        if not self.exact:
            raise ValueError(f"budget exhausted: value lies in [{self.lower}, {self.upper}]")
        return self.lower


def k_coloring(g: Graph, k: int, budget: Budget | None = None, clique: Sequence[int] = ()) -> Coloring | None:
    """A proper ``k``-colouring, or ``None`` if none exists.

    Backtracking with forward checking on colour domains, most-constrained
    vertex first. ``clique`` (if given) is pre-coloured ``0, 1, ...`` and new
    colours are only opened in increasing order, which removes colour-permutation
    symmetry. Raises ``TimeoutError`` when the budget runs out.
    """
    clock = _Clock(budget)
    try:
        return _k_coloring(g, k, clock, clique)
    except _OutOfBudget:
        raise TimeoutError(f"budget exhausted after {clock.nodes} nodes") from None


def _k_coloring(g: Graph, k: int, clock: _Clock, clique: Sequence[int]) -> Coloring | None:
    N = g.num_vertices
    if N == 0:
        return Coloring((), max(k, 0))
    if k <= 0 or len(clique) > k:
        return None
    adj = g.adjacency
    full = (1 << k) - 1
    dom = [full] * N
    color = [-1] * N
    trail: list[int] = []
    deg = [len(a) for a in adj]

    def assign(v: int, c: int) -> bool:
        color[v] = c
        bit = 1 << c
        ok = True
        for u in adj[v]:
            if color[u] < 0 and dom[u] & bit:
                dom[u] ^= bit
                trail.append(u)
                trail.append(bit)
                if not dom[u]:
                    ok = False
        return ok

    def undo(mark: int) -> None:
        while len(trail) > mark:
            bit = trail.pop()
            u = trail.pop()
            dom[u] |= bit

    for i, v in enumerate(clique):
        if not assign(v, i):
            return None
    uncolored = [v for v in range(N) if color[v] < 0]

    def pick() -> int:
        best, best_key = -1, None
        for v in uncolored:
            if color[v] < 0:
                key = (dom[v].bit_count(), -deg[v])
                if best_key is None or key < best_key:
                    best, best_key = v, key
                    if key[0] == 1:
                        break
        return best

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * N + 100))

    def rec(left: int, used: int) -> bool:
        clock.tick()
        if left == 0:
            return True
        v = pick()
        avail = dom[v] & ((1 << min(used + 1, k)) - 1)
        while avail:
            bit = avail & -avail
            avail ^= bit
            c = bit.bit_length() - 1
            mark = len(trail)
            if assign(v, c) and rec(left - 1, max(used, c + 1)):
                return True
            undo(mark)
            color[v] = -1
        return False

    if not rec(len(uncolored), len(clique)):
        return None
    return Coloring(tuple(color), k)


def exact_chromatic_number(g: Graph, budget: Budget | None = None, seed: int = 0) -> SearchResult:
    """Chromatic number with a certificate, or a ``[lower, upper]`` bracket on budget exhaustion."""
    start = time.monotonic()
    clique = greedy_clique(g) if g.num_vertices else []
    best = dsatur_coloring(g, seed)
    lower = max(len(clique), 1 if g.num_vertices else 0)
    upper = best.num_colors
    log = [f"clique lower bound {lower}, DSATUR upper bound {upper}"]
    clock = _Clock(budget)
    try:
        while upper > lower:
            k = upper - 1
            found = _k_coloring(g, k, clock, clique)
            if found is None:
                log.append(f"no {k}-colouring exists")
                lower = upper
            else:
                log.append(f"found a {k}-colouring")
                best, upper = found, k
    except _OutOfBudget:
        log.append(f"budget exhausted while testing {upper - 1} colours")
    _assert_proper(g, best)
    return SearchResult(lower, upper, best, clock.nodes, time.monotonic() - start, log)


# ---------------------------------------------------------------------------
# independence number

def greedy_independent_set(g: Graph) -> list[int]:
    """Repeatedly take a vertex of least remaining degree."""
    adj = [set(a) for a in g.adjacency]
    alive = set(range(g.num_vertices))
    out = []
    while alive:
        v = min(alive, key=lambda u: (len(adj[u] & alive), u))
        out.append(v)
        alive -= adj[v] | {v}
    return sorted(out)


def _cover_sort(P: int, adj: list[int]) -> tuple[list[int], list[int]]:
    # greedy clique cover of P; bounds[i] = number of cliques used up to order[i]
    order, bounds = [], []
    k = 0
    while P:
        k += 1
        Q = P
        while Q:
            b = Q & -Q
            v = b.bit_length() - 1
            Q &= adj[v]
            P &= ~b
            order.append(v)
            bounds.append(k)
    return order, bounds


def max_independent_set(g: Graph, budget: Budget | None = None) -> SearchResult:
    """Maximum independent set by branch and bound over bitsets.

    Candidates are sorted into a greedy clique cover; a branch is cut once the
    current set size plus the number of cliques left cannot beat the incumbent.
    On budget exhaustion the bracket's upper end is the better of the
    clique-cover and edge-counting (``N - m / max degree``) bounds.
    """
    start = time.monotonic()
    N = g.num_vertices
    if N == 0:
        return SearchResult(0, 0, [])
    adj = [0] * N
    for v, row in enumerate(g.adjacency):
        for u in row:
            adj[v] |= 1 << u
    full = (1 << N) - 1
    non = [full & ~adj[v] & ~(1 << v) for v in range(N)]
    seed = greedy_independent_set(g)
    best = {"size": len(seed), "set": seed}
    cover = _cover_sort(full, adj)[1][-1]
    max_deg = int(g.degrees().max())
    degree_bound = N - (-(-g.edge_count // max_deg)) if max_deg else N
    root_upper = min(cover, degree_bound)
    clock = _Clock(budget)

    def expand(size: int, P: int, chosen: list[int]) -> None:
        clock.tick()
        order, bounds = _cover_sort(P, adj)
        for i in range(len(order) - 1, -1, -1):
            if size + bounds[i] <= best["size"]:
                return
            v = order[i]
            rest = P & non[v]
            chosen.append(v)
            if rest:
                expand(size + 1, rest, chosen)
            elif size + 1 > best["size"]:
                best["size"], best["set"] = size + 1, sorted(chosen)
            chosen.pop()
            P &= ~(1 << v)

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * N + 100))
    try:
        expand(0, full, [])
        lower = upper = best["size"]
    except _OutOfBudget:
        lower, upper = best["size"], max(best["size"], root_upper)
    cert = best["set"]
    if any(g.has_edge(u, v) for i, u in enumerate(cert) for v in cert[i + 1:]):
        raise AssertionError("internal error: certificate is not independent")
    return SearchResult(lower, upper, cert, clock.nodes, time.monotonic() - start)
