"""Label-vector partitions and set-partition enumeration."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of ``n`` points to ``K`` labelled groups.

    Groups may be empty; ``K`` is the size of the label alphabet, not the
    number of groups in use.
    """

    labels: np.ndarray
    K: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).copy()
        if labels.ndim != 1:
            raise ValueError("labels must be a 1-D vector")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if labels.size and (labels.min() < 0 or labels.max() >= self.K):
            raise ValueError(f"labels must lie in [0, {self.K})")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels: Sequence[int], K: int | None = None) -> "Partition":
        labels = np.asarray(labels, dtype=np.int64)
        if K is None:
            K = int(labels.max()) + 1 if labels.size else 1
        return cls(labels, K)

    @classmethod
    def from_groups(cls, groups: Sequence[Sequence[int]], n: int | None = None) -> "Partition":
        if n is None:
            n = sum(len(g) for g in groups)
        labels = np.full(n, -1, dtype=np.int64)
        for k, g in enumerate(groups):
            for i in g:
                if labels[i] != -1:
                    raise ValueError(f"point {i} appears in two groups")
                labels[i] = k
        if (labels < 0).any():
            raise ValueError("groups do not cover every point")
        return cls(labels, max(len(groups), 1))

    @property
    def n(self) -> int:
        return int(self.labels.size)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.K)

    def groups(self) -> list[list[int]]:
        """Nonempty groups, in label order."""
        out = [[] for _ in range(self.K)]
        for i, k in enumerate(self.labels):
            out[k].append(i)
        return [g for g in out if g]

    @property
    def n_groups(self) -> int:
        return int(np.count_nonzero(self.sizes()))

    def canonical(self) -> "Partition":
        """Relabel groups in order of first occurrence."""
        mapping: dict[int, int] = {}
        out = np.empty_like(self.labels)
        for i, k in enumerate(self.labels):
            k = int(k)
            if k not in mapping:
                mapping[k] = len(mapping)
            out[i] = mapping[k]
        return Partition(out, self.K)

    def same_as(self, other: "Partition") -> bool:
        """Equality as set partitions (labels ignored)."""
        return self.n == other.n and np.array_equal(
            self.canonical().labels, other.canonical().labels
        )

    def __repr__(self) -> str:
        return f"Partition(K={self.K}, groups={self.groups()})"


def restricted_growth_strings(n: int, max_blocks: int | None = None) -> Iterator[tuple[int, ...]]:
    """Yield every set partition of ``range(n)`` as a restricted growth string.

    Position ``i`` holds the block index of point ``i``; block indices appear
    in order of first use, so each set partition is produced exactly once.
    """
    if max_blocks is None:
        max_blocks = n
    if n == 0:
        yield ()
        return
    if max_blocks < 1:
        return
    a = [0] * n

    def rec(i: int, used: int):
        if i == n:
            yield tuple(a)
            return
        top = min(used + 1, max_blocks)
        for b in range(top):
            a[i] = b
            yield from rec(i + 1, max(used, b + 1))

    yield from rec(1, 1)


def falling_factorial(K: int, b: int) -> int:
    out = 1
    for t in range(b):
        out *= K - t
    return out
