"""Signed reversal graphs, reversal graphs and cell-based colourings of them.

A signed permutation of degree ``k`` is a tuple of nonzero integers whose
absolute values permute ``1..k``. Vertex indices in ``SR_k`` are
``perm_rank * 2**k + mask`` where ``perm_rank`` is the lexicographic rank of
the underlying permutation and bit ``i`` of ``mask`` is set when position ``i``
(0-based) carries a minus sign.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np

from .graph import CellPartition, Graph

MAX_SR_DEGREE = 6
MAX_REVERSAL_DEGREE = 7


@dataclass(frozen=True)
class SignedPermutation:
    entries: tuple[int, ...]

    def __post_init__(self):
        k = len(self.entries)
        if sorted(abs(x) for x in self.entries) != list(range(1, k + 1)):
            raise ValueError(f"{self.entries} is not a signed permutation")

    @classmethod
    def parse(cls, text: str) -> "SignedPermutation":
        """Accepts ``"2+3-1+"`` or comma separated integers ``"2,-3,1"``."""
        text = text.strip()
        if re.fullmatch(r"(\d+[+-])+", text):
            return cls(tuple(int(d) * (-1 if s == "-" else 1) for d, s in re.findall(r"(\d+)([+-])", text)))
        return cls(tuple(int(x) for x in text.split(",")))

    @property
    def k(self) -> int:
        return len(self.entries)

    def base(self) -> tuple[int, ...]:
        return tuple(abs(x) for x in self.entries)

    def __str__(self) -> str:
        return "".join(f"{abs(x)}{'-' if x < 0 else '+'}" for x in self.entries)


def apply_signed_reversal(s: SignedPermutation | Sequence[int], i: int, j: int) -> SignedPermutation:
    """Reverse positions ``i..j`` (1-indexed, inclusive) and negate them."""
    e = s.entries if isinstance(s, SignedPermutation) else tuple(s)
    if not 1 <= i <= j <= len(e):
        raise IndexError(f"need 1 <= i <= j <= {len(e)}, got i={i}, j={j}")
    return SignedPermutation(e[:i - 1] + tuple(-x for x in reversed(e[i - 1:j])) + e[j:])


def permutations_lex(k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int8)
    return np.array(list(itertools.permutations(range(1, k + 1))), dtype=np.int8)


def _perm_keys(perms: np.ndarray, k: int) -> np.ndarray:
    keys = np.zeros(len(perms), dtype=np.int64)
    for col in range(perms.shape[1]):
        keys = keys * (k + 1) + perms[:, col]
    return keys


@dataclass(frozen=True, eq=False)
class SignedReversalGraph:
    k: int
    graph: Graph
    entries: np.ndarray  # (N, k) signed entries of each vertex
    perm_keys: np.ndarray

    def vertex(self, index: int) -> SignedPermutation:
        return SignedPermutation(tuple(self.entries[index].tolist()))

    def index_of(self, s: SignedPermutation | Sequence[int]) -> int:
        e = s.entries if isinstance(s, SignedPermutation) else tuple(s)
        if len(e) != self.k:
            raise ValueError("degree mismatch")
        return int(self.indices_of(np.array([e], dtype=np.int8))[0])

    def indices_of(self, entries: np.ndarray) -> np.ndarray:
        k = self.k
        absval = np.abs(entries)
        rank = np.searchsorted(self.perm_keys, _perm_keys(absval, k))
        mask = ((entries < 0).astype(np.int64) << np.arange(k)).sum(axis=1) if k else 0
        return rank * (1 << k) + mask

    def cell(self, index: int) -> int:
        return index >> self.k


def _all_signed(k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int8)
    perms = permutations_lex(k)
    masks = np.arange(1 << k)
    signs = 1 - 2 * ((masks[:, None] >> np.arange(k)) & 1)  # (2^k, k)
    out = perms[:, None, :] * signs[None, :, :]
    return out.reshape(-1, k).astype(np.int8)


@lru_cache(maxsize=None)
def build_signed_reversal_graph(k: int) -> SignedReversalGraph:
    """All signed permutations of degree ``k`` joined by signed reversals."""
    if not 0 <= k <= MAX_SR_DEGREE:
        raise ValueError(f"k must be in 0..{MAX_SR_DEGREE}")
    entries = _all_signed(k)
    keys = _perm_keys(permutations_lex(k), k)
    proto = SignedReversalGraph(k, None, entries, keys)
    deg = comb(k + 1, 2)
    table = np.empty((len(entries), deg), dtype=np.int32)
    for col, (i, j) in enumerate(itertools.combinations_with_replacement(range(k), 2)):
        new = entries.copy()
        new[:, i:j + 1] = -entries[:, i:j + 1][:, ::-1]
        table[:, col] = proto.indices_of(new)
    if deg == 0:
        g = Graph(np.zeros(2, dtype=np.int64), np.zeros(0, dtype=np.int32))
    else:
        g = Graph.from_regular_rows(table)
    return SignedReversalGraph(k, g, entries, keys)


@lru_cache(maxsize=None)
def build_reversal_graph(k: int) -> Graph:
    """Permutations of ``1..k`` (lexicographic order) joined by reversals of length >= 2."""
    if not 1 <= k <= MAX_REVERSAL_DEGREE:
        raise ValueError(f"k must be in 1..{MAX_REVERSAL_DEGREE}")
    perms = permutations_lex(k)
    keys = _perm_keys(perms, k)
    deg = comb(k, 2)
    if deg == 0:
        return Graph(np.zeros(2, dtype=np.int64), np.zeros(0, dtype=np.int32))
    table = np.empty((len(perms), deg), dtype=np.int32)
    for col, (i, j) in enumerate(itertools.combinations(range(k), 2)):
        new = perms.copy()
        new[:, i:j + 1] = perms[:, i:j + 1][:, ::-1]
        table[:, col] = np.searchsorted(keys, _perm_keys(new, k))
    return Graph.from_regular_rows(table)


def cell_partition(k: int) -> CellPartition:
    """Cells ``V_pi`` of ``SR_k`` (same underlying permutation), ordered by permutation rank."""
    if k < 1:
        raise ValueError("k must be positive")
    size = 1 << k
    cells = [range(r * size, (r + 1) * size) for r in range(factorial(k))]
    names = [tuple(p) for p in permutations_lex(k).tolist()]
    return CellPartition(cells, size * factorial(k), names)


def sign_position_partition(n: int) -> CellPartition:
    """Cells ``U_j(+)``, ``j = 1..n``, then ``U_j(-)``: where ``n`` sits and with which sign."""
    sr = build_signed_reversal_graph(n)
    pos = np.argmax(np.abs(sr.entries) == n, axis=1)
    neg = sr.entries[np.arange(len(pos)), pos] < 0
    labels = pos + n * neg
    names = [(j + 1, "+") for j in range(n)] + [(j + 1, "-") for j in range(n)]
    return CellPartition([np.nonzero(labels == c)[0] for c in range(2 * n)], len(labels), names)


# ---------------------------------------------------------------------------
# parity-class colourings

@dataclass(frozen=True)
class ParityClassToken:
    """Half of a cell ``V_pi``: the vertices whose number of ``+`` signs has the given parity."""

    base: tuple[int, ...]
    parity: int

    def __post_init__(self):
        if sorted(self.base) != list(range(1, len(self.base) + 1)):
            raise ValueError(f"{self.base} is not a permutation")
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")

    @classmethod
    def parse(cls, text: str) -> "ParityClassToken":
        digits, _, parity = text.strip().partition("^")
        return cls(tuple(int(d) for d in digits), int(parity))

    def __str__(self) -> str:
        return "".join(map(str, self.base)) + f"^{self.parity}"


_SECTION = re.compile(r"colou?r\s*(\d+)\s*:", re.IGNORECASE)
_TOKEN = re.compile(r"(\d+)\s*\^\s*\{?\s*([01])\s*\}?")


def parse_parity_coloring(text: str) -> list[tuple[ParityClassToken, int]]:
    """Parse ``color <c>:`` sections of ``<digits>^<parity>`` tokens.

    Math markup such as ``$52143^{0}$`` and list brackets are tolerated.
    """
    heads = list(_SECTION.finditer(text))
    if not heads:
        raise ValueError("no 'color <c>:' section found")
    out = []
    for h, nxt in zip(heads, heads[1:] + [None]):
        body = text[h.end():nxt.start() if nxt else len(text)]
        color = int(h.group(1))
        for digits, parity in _TOKEN.findall(body):
            out.append((ParityClassToken(tuple(int(d) for d in digits), int(parity)), color))
    return out


def format_parity_coloring(classes: Iterable[tuple[ParityClassToken, int]]) -> str:
    by_color: dict[int, list[str]] = {}
    for tok, c in classes:
        by_color.setdefault(c, []).append(str(tok))
    return "".join(f"color {c}:\n" + " ".join(toks) + "\n" for c, toks in sorted(by_color.items()))


def expand_parity_coloring(k: int, classes: Iterable[tuple[ParityClassToken, int]]):
    """Colour every vertex of ``SR_k`` by the token of its cell and ``+``-count parity."""
    from .coloring import Coloring

    sr = build_signed_reversal_graph(k)
    size = 1 << k
    table = {}
    for tok, color in classes:
        if len(tok.base) != k:
            raise ValueError(f"token {tok} has the wrong degree")
        if (tok.base, tok.parity) in table:
            raise ValueError(f"duplicated token {tok}")
        table[tok.base, tok.parity] = color
    perms = [tuple(p) for p in permutations_lex(k).tolist()]
    missing = [f"{''.join(map(str, p))}^{q}" for p in perms for q in (0, 1) if (p, q) not in table]
    if missing:
        raise ValueError(f"missing tokens: {', '.join(missing[:5])}" + (" ..." if len(missing) > 5 else ""))
    masks = np.arange(size)
    minus = np.array([bin(m).count("1") for m in masks])
    plus_parity = (k - minus) % 2
    colors = np.empty(sr.graph.num_vertices, dtype=np.int64)
    for r, p in enumerate(perms):
        colors[r * size:(r + 1) * size] = np.where(plus_parity == 0, table[p, 0], table[p, 1])
    return Coloring.from_labels(colors)


def cell_pair_tokens(k: int, pairs: dict[tuple[int, ...], tuple[int, int]]) -> list[tuple[ParityClassToken, int]]:
    """Turn a two-colours-per-cell scheme into parity tokens.

    ``pairs[pi] = (first, second)``: ``first`` goes on the all-plus vertex of
    ``V_pi`` and on every vertex at even Hamming distance from it.
    """
    all_plus = k % 2
    out = []
    for base, (first, second) in pairs.items():
        out.append((ParityClassToken(tuple(base), all_plus), first))
        out.append((ParityClassToken(tuple(base), 1 - all_plus), second))
    return out


def parse_cell_pairs(text: str) -> dict[tuple[int, ...], tuple[int, int]]:
    """Lines ``<perm digits> <first colour digit><second colour digit>``."""
    out = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        perm, colors = line.split()
        out[tuple(int(d) for d in perm)] = (int(colors[0]), int(colors[1]))
    return out


def _data(name: str) -> str:
    return resources.files("flipgraphs.data").joinpath(name).read_text()


def known_coloring(k: int):
    """The stored small-palette colouring of ``SR_k`` for ``k`` in 3..5."""
    if k == 5:
        return expand_parity_coloring(5, parse_parity_coloring(_data("sr5_coloring.txt")))
    if k in (3, 4):
        pairs = parse_cell_pairs(_data(f"sr{k}_cells.txt"))
        return expand_parity_coloring(k, cell_pair_tokens(k, pairs))
    raise ValueError("stored colourings exist for k = 3, 4, 5")


def parity_coloring(k: int):
    """Proper 2-colouring of ``SR_k`` for ``k <= 2`` (1 colour for ``k = 0``)."""
    from .coloring import Coloring

    if k == 0:
        return Coloring((0,), 1)
    if k > 2:
        raise ValueError("SR_k is bipartite only for k <= 2")
    sr = build_signed_reversal_graph(k)
    # every signed reversal of length 1 or 2 flips the parity of (minus count + inversions)
    minus = (sr.entries < 0).sum(axis=1)
    inv = np.zeros(len(minus), dtype=np.int64)
    ab = np.abs(sr.entries)
    for i, j in itertools.combinations(range(k), 2):
        inv += ab[:, i] > ab[:, j]
    return Coloring.from_labels((minus + inv) % 2)
