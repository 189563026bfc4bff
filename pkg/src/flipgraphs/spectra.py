"""Eigenvalues of flip graphs from integer partitions, with exact and numerical checks."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, floor, ceil
from typing import Sequence

import numpy as np

from .graph import Graph
from .matchings import double_factorial_odd, partitions_desc


def enumerate_partitions(n: int) -> list[tuple[int, ...]]:
    """All partitions of ``n`` in descending lexicographic order."""
    if n < 1:
        raise ValueError("n must be positive")
    return partitions_desc(n)


def check_partition(lam: Sequence[int]) -> tuple[int, ...]:
    lam = tuple(lam)
    if not lam or any(x < 1 for x in lam) or any(a < b for a, b in zip(lam, lam[1:])):
        raise ValueError(f"{lam} is not a partition")
    return lam


def transpose(mu: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(1 for x in mu if x > j) for j in range(mu[0])) if mu else ()


def hook_lengths(mu: Sequence[int]) -> list[int]:
    """Hook length of every cell ``(i, j)`` (1-indexed) of the Young diagram of ``mu``."""
    mu = check_partition(mu)
    mt = transpose(mu)
    return [mu[i - 1] + mt[j - 1] - i - j + 1 for i in range(1, len(mu) + 1) for j in range(1, mu[i - 1] + 1)]


def beta_eigenvalue(lam: Sequence[int]) -> int:
    """``sum_j lam_j (lam_j - j)`` with 1-indexed ``j``."""
    lam = check_partition(lam)
    return sum(x * (x - j) for j, x in enumerate(lam, 1))


def eigenvalue_multiplicity(lam: Sequence[int]) -> int:
    """Dimension of the irreducible indexed by ``2*lam``: ``(2n)!`` over the hook product."""
    lam = check_partition(lam)
    mu = tuple(2 * x for x in lam)
    denom = 1
    for h in hook_lengths(mu):
        denom *= h
    num = factorial(sum(mu))
    q, r = divmod(num, denom)
    if r:
        raise ArithmeticError(f"hook quotient for {lam} is not integral")
    return q


@dataclass(frozen=True)
class SpectrumEntry:
    eigenvalue: int
    multiplicity: int
    partitions: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict:
        return {"eigenvalue": self.eigenvalue, "multiplicity": str(self.multiplicity),
                "partitions": [list(p) for p in self.partitions]}

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumEntry":
        return cls(int(d["eigenvalue"]), int(d["multiplicity"]), tuple(tuple(p) for p in d["partitions"]))


def flip_spectrum(n: int) -> list[SpectrumEntry]:
    """Spectrum of the flip graph on ``K_2n``, coinciding eigenvalues merged, largest first."""
    groups: dict[int, list[tuple[int, ...]]] = defaultdict(list)
    for lam in enumerate_partitions(n):
        groups[beta_eigenvalue(lam)].append(lam)
    return [SpectrumEntry(b, sum(eigenvalue_multiplicity(l) for l in lams), tuple(lams))
            for b, lams in sorted(groups.items(), reverse=True)]


def spectrum_to_json(entries: Sequence[SpectrumEntry]) -> str:
    return json.dumps([e.to_dict() for e in entries])


def spectrum_from_json(text: str) -> list[SpectrumEntry]:
    return [SpectrumEntry.from_dict(d) for d in json.loads(text)]


class SpectrumMismatch(AssertionError):
    pass


class AnnihilationFailed(SpectrumMismatch):
    pass


class MomentMismatch(SpectrumMismatch):
    def __init__(self, m: int, trace: int, expected: int):
        super().__init__(f"trace(A^{m}) = {trace} but the spectrum gives {expected}")
        self.m = m
        self.trace = trace
        self.expected = expected


@dataclass
class SpectrumReport:
    num_vertices: int
    distinct: int
    moments: list[int]
    verified: bool = True


def _int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # int64 matmul when the row-sum bound rules out overflow, Python ints otherwise
    bound = int(np.abs(a).sum(axis=1).max(initial=0)) * int(np.abs(b).max(initial=0))
    if bound < 2 ** 62 and a.dtype == np.int64 and b.dtype == np.int64:
        return a @ b
    return np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)


def verify_spectrum_exact(g: Graph, spectrum: Sequence[SpectrumEntry]) -> SpectrumReport:
    """Exact check of a claimed integer spectrum against the adjacency matrix.

    The product of ``A - beta I`` over the claimed eigenvalues must vanish, so
    every eigenvalue of ``A`` is claimed; the traces of ``A^m`` for
    ``m < #distinct`` must match the claimed power sums, which pins down the
    multiplicities because the Vandermonde system is nonsingular.
    """
    N = g.num_vertices
    total = sum(e.multiplicity for e in spectrum)
    if total != N:
        raise ValueError(f"multiplicities sum to {total}, graph has {N} vertices")
    betas = [e.eigenvalue for e in spectrum]
    if len(set(betas)) != len(betas):
        raise ValueError("eigenvalues must be distinct")
    a = g.adjacency_matrix(np.int64)
    eye = np.eye(N, dtype=np.int64)

    prod = eye
    for b in betas:
        prod = _int_matmul(prod, a - b * eye)
    if np.any(prod != 0):
        raise AnnihilationFailed("the product of (A - beta I) over the claimed eigenvalues is not zero")

    moments = []
    power = eye
    for m in range(len(betas)):
        if m:
            power = _int_matmul(power, a)
        trace = int(sum(int(x) for x in np.diagonal(power)))
        expected = sum(e.multiplicity * e.eigenvalue ** m for e in spectrum)
        if trace != expected:
            raise MomentMismatch(m, trace, expected)
        moments.append(trace)
    return SpectrumReport(N, len(betas), moments)


def symmetric_eigenvalues(m: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """All eigenvalues of a real symmetric matrix, largest first."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(m, m.T, rtol=0, atol=tol):
        raise ValueError("matrix is not symmetric")
    return np.linalg.eigvalsh(m)[::-1]


def graph_eigenvalues(g: Graph) -> np.ndarray:
    return symmetric_eigenvalues(g.adjacency_matrix(float))


def quotient_eigenvalues(b: np.ndarray) -> np.ndarray:
    """Eigenvalues of a (possibly nonsymmetric) quotient matrix, real parts, largest first."""
    vals = np.linalg.eigvals(np.asarray(b, dtype=float))
    return np.sort(vals.real)[::-1]


@dataclass
class HoffmanBounds:
    chromatic_ratio: Fraction
    independence_ratio: Fraction

    @property
    def chromatic(self) -> int:
        return ceil(self.chromatic_ratio)

    @property
    def independence(self) -> int:
        return floor(self.independence_ratio)


def hoffman_bounds(degree: int, min_eig: int | Fraction, num_vertices: int) -> HoffmanBounds:
    """``chi >= 1 + d/|theta_min|`` and ``alpha <= N |theta_min| / (d + |theta_min|)``."""
    if min_eig >= 0:
        raise ValueError("the smallest eigenvalue of a nonempty graph is negative")
    t = abs(Fraction(min_eig))
    return HoffmanBounds(1 + Fraction(degree) / t, num_vertices * t / (degree + t))


def flip_hoffman_bounds(n: int) -> HoffmanBounds:
    return hoffman_bounds(n * (n - 1), -comb(n, 2), double_factorial_odd(n))


@dataclass(frozen=True)
class ChungTobinSystem:
    n: int
    x: int
    X: np.ndarray
    D: np.ndarray  # diagonal entries

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.D) + self.X

    def formula_eigenvalues(self) -> list[int]:
        """``x - floor(k/2) n + 2 C(floor(k/2), 2)`` for ``k = 1..n``."""
        return [self.x - (k // 2) * self.n + 2 * comb(k // 2, 2) for k in range(1, self.n + 1)]


def chung_tobin_matrix(n: int) -> np.ndarray:
    i = np.arange(1, n + 1)
    I, J = np.meshgrid(i, i, indexing="ij")
    return np.minimum(np.minimum(I, J), np.minimum(n - I + 1, n - J + 1)).astype(np.int64)


def chung_tobin_system(n: int, x: int) -> ChungTobinSystem:
    if n < 1:
        raise ValueError("n must be positive")
    X = chung_tobin_matrix(n)
    return ChungTobinSystem(n, x, X, x - X.sum(axis=1))


def sr_block_quotient(n: int) -> np.ndarray:
    """``[[D', X], [X, D']]`` with ``D' + X`` of constant row sum ``C(n+1, 2)``."""
    ct = chung_tobin_system(n, comb(n + 1, 2))
    Dp = np.diag(ct.D)
    return np.block([[Dp, ct.X], [ct.X, Dp]])
