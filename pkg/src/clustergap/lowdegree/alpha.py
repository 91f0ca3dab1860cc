"""Integer matrices viewed as bipartite multigraphs between points and coordinates.

Row 0 is the first point and row 1 the second point of the target
``x = 1{k_0 = k_1}``; this convention is used throughout the subpackage.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

Entries = tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class AlphaMatrix:
    """Sparse ``n x p`` matrix of positive multiplicities.

    ``entries`` is the sorted tuple of ``(row, col, multiplicity)``; equality
    and hashing use it alone, so it doubles as a memoisation key.
    """

    entries: Entries
    n: int | None = None
    p: int | None = None

    def __post_init__(self):
        cleaned = {}
        for i, j, m in self.entries:
            if m < 0:
                raise ValueError("multiplicities must be nonnegative")
            if m:
                cleaned[(int(i), int(j))] = cleaned.get((int(i), int(j)), 0) + int(m)
        ents = tuple(sorted((i, j, m) for (i, j), m in cleaned.items()))
        object.__setattr__(self, "entries", ents)
        if self.n is not None and any(i >= self.n for i, _, _ in ents):
            raise ValueError("row index out of range")
        if self.p is not None and any(j >= self.p for _, j, _ in ents):
            raise ValueError("column index out of range")

    def __eq__(self, other):
        return isinstance(other, AlphaMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    @classmethod
    def from_dict(cls, d: Mapping[tuple[int, int], int], n: int | None = None,
                  p: int | None = None) -> "AlphaMatrix":
        return cls(tuple((i, j, m) for (i, j), m in d.items()), n, p)

    @classmethod
    def from_dense(cls, a) -> "AlphaMatrix":
        a = np.asarray(a, dtype=np.int64)
        n, p = a.shape
        return cls(tuple((int(i), int(j), int(a[i, j])) for i, j in zip(*np.nonzero(a))), n, p)

    def to_dense(self, n: int | None = None, p: int | None = None) -> np.ndarray:
        n = n or self.n or (max(self.rows(), default=-1) + 1)
        p = p or self.p or (max(self.cols(), default=-1) + 1)
        out = np.zeros((n, p), dtype=np.int64)
        for i, j, m in self.entries:
            out[i, j] = m
        return out

    def as_dict(self) -> dict[tuple[int, int], int]:
        return {(i, j): m for i, j, m in self.entries}

    @property
    def size(self) -> int:
        """``|alpha|``, the number of multi-edges."""
        return sum(m for _, _, m in self.entries)

    def factorial(self) -> int:
        return math.prod(math.factorial(m) for _, _, m in self.entries)

    def rows(self) -> list[int]:
        return sorted({i for i, _, _ in self.entries})

    def cols(self) -> list[int]:
        return sorted({j for _, j, _ in self.entries})

    def is_zero(self) -> bool:
        return not self.entries

    def __sub__(self, other: "AlphaMatrix") -> "AlphaMatrix":
        d = self.as_dict()
        for (i, j), m in other.as_dict().items():
            left = d.get((i, j), 0) - m
            if left < 0:
                raise ValueError("subtraction would go negative")
            d[(i, j)] = left
        return AlphaMatrix.from_dict(d, self.n, self.p)

    def sublattice(self) -> Iterator["AlphaMatrix"]:
        """Every ``beta`` with ``0 <= beta <= alpha`` entrywise (``alpha`` included)."""
        cells = [(i, j) for i, j, _ in self.entries]
        ranges = [range(m + 1) for _, _, m in self.entries]
        for combo in itertools.product(*ranges):
            yield AlphaMatrix(tuple((i, j, b) for (i, j), b in zip(cells, combo)), self.n, self.p)

    def binom(self, beta: "AlphaMatrix") -> int:
        b = beta.as_dict()
        return math.prod(math.comb(m, b.get((i, j), 0)) for i, j, m in self.entries)

    def __repr__(self) -> str:
        return f"AlphaMatrix({self.as_dict()})"


@dataclass(frozen=True)
class GraphStats:
    m: int
    r: int
    edges: int
    l: int
    cc: int
    connected: bool
    has_rows_1_2: bool
    min_col_distinct_degree: int


def components(entries: Iterable[tuple[int, int, int]]) -> int:
    """Connected components of the support graph (isolated nodes excluded)."""
    parent: dict[tuple[str, int], tuple[str, int]] = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j, _ in entries:
        u, v = ("u", i), ("v", j)
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return sum(1 for a in parent if find(a) == a)


def graph_stats(alpha: AlphaMatrix) -> GraphStats:
    rows, cols = alpha.rows(), alpha.cols()
    cc = components(alpha.entries)
    col_deg: dict[int, int] = {}
    for _, j, _ in alpha.entries:
        col_deg[j] = col_deg.get(j, 0) + 1
    return GraphStats(
        m=len(rows),
        r=len(cols),
        edges=alpha.size,
        l=len(rows) + len(cols),
        cc=cc,
        connected=cc == 1,
        has_rows_1_2=0 in rows and 1 in rows,
        min_col_distinct_degree=min(col_deg.values(), default=0),
    )


def null_cumulant_filter(alpha: AlphaMatrix) -> bool:
    """True unless the cumulant is guaranteed to vanish.

    A nonzero ``alpha`` can carry a nonzero cumulant only if its graph is
    connected, spans rows 0 and 1, and every coordinate node touches at least
    two distinct points.
    """
    if alpha.is_zero():
        raise ValueError("the zero matrix is handled separately (kappa_0 = 1/K)")
    s = graph_stats(alpha)
    return s.connected and s.has_rows_1_2 and s.min_col_distinct_degree >= 2


def topology_conditions(alpha: AlphaMatrix) -> bool:
    """Necessary counts for a nonzero cumulant: ``m >= 2``, ``|a| >= 2r``, ``|a| >= r + m - 1``."""
    s = graph_stats(alpha)
    return s.m >= 2 and s.edges >= 2 * s.r and s.edges >= s.r + s.m - 1


def all_alphas(n: int, p: int, max_size: int, min_size: int = 0) -> Iterator[AlphaMatrix]:
    """Every ``n x p`` nonnegative integer matrix with ``min_size <= |alpha| <= max_size``.

    Generated as non-decreasing sequences of cells, so each matrix appears once.
    """
    cells = [(i, j) for i in range(n) for j in range(p)]
    for d in range(min_size, max_size + 1):
        for combo in itertools.combinations_with_replacement(range(len(cells)), d):
            counts: dict[int, int] = {}
            for c in combo:
                counts[c] = counts.get(c, 0) + 1
            yield AlphaMatrix(tuple((*cells[c], m) for c, m in counts.items()), n, p)


def count_alphas(n: int, p: int, max_size: int) -> int:
    return sum(math.comb(n * p + d - 1, d) for d in range(max_size + 1))
