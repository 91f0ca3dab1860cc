"""Clustering algorithms: exact K-means, Lloyd, single linkage, spectral."""
from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from . import rng as _rng
from .metrics import kmeans_criterion
from .partition import Partition, restricted_growth_strings

DEFAULT_N_MAX = 14
REL_TOL = 1e-12


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class KMeansResult:
    partition: Partition
    criterion: float
    optimal: bool
    nodes: int


def exact_kmeans(data, K: int, time_budget: float | None = None,
                 n_max: int = DEFAULT_N_MAX, upper_bound: float | None = None) -> KMeansResult:
    """Global minimiser of the K-means criterion over partitions into at most ``K`` groups.

    Depth-first search over restricted growth strings. The partial criterion
    of the points placed so far only grows as points are added, so a branch
    is cut once it reaches the incumbent. Without ``time_budget`` the search
    refuses ``n > n_max``; with a budget it returns the incumbent flagged
    ``optimal=False`` when time runs out.
    """
    Y = np.asarray(data, dtype=np.float64)
    n = Y.shape[0]
    if K < 1:
        raise ValueError("K must be >= 1")
    if n > n_max and time_budget is None:
        raise BudgetError(f"n={n} exceeds n_max={n_max}; pass a time_budget")
    if n == 0:
        return KMeansResult(Partition(np.zeros(0, dtype=np.int64), K), 0.0, True, 0)
    K_eff = min(K, n)

    # incumbent: Lloyd, or a caller-supplied bound
    if upper_bound is None:
        seed_part = lloyd(Y, K_eff, restarts=4, max_iters=100, seed=0)
        best_labels = seed_part.labels.copy()
        best = kmeans_criterion(Y, seed_part)
    else:
        best_labels = None
        best = float(upper_bound)

    counts = np.zeros(K_eff, dtype=np.int64)
    sums = np.zeros((K_eff, Y.shape[1]))
    labels = np.zeros(n, dtype=np.int64)
    deadline = None if time_budget is None else time.monotonic() + time_budget
    state = {"nodes": 0, "timed_out": False, "best": best, "labels": best_labels}

    def rec(i: int, used: int, cost: float):
        state["nodes"] += 1
        if deadline is not None and state["nodes"] % 4096 == 0 and time.monotonic() > deadline:
            state["timed_out"] = True
        if state["timed_out"]:
            return
        if i == n:
            if cost < state["best"] * (1 - REL_TOL) or state["labels"] is None:
                state["best"] = cost
                state["labels"] = labels.copy()
            return
        y = Y[i]
        for k in range(min(used + 1, K_eff)):
            c = counts[k]
            if c:
                diff = y - sums[k] / c
                inc = c / (c + 1) * float(diff @ diff)
            else:
                inc = 0.0
            new = cost + inc
            if new >= state["best"] * (1 - REL_TOL) and state["labels"] is not None:
                continue
            counts[k] += 1
            sums[k] += y
            labels[i] = k
            rec(i + 1, max(used, k + 1), new)
            counts[k] -= 1
            sums[k] -= y

    limit = max(1000, 10 * n + 100)
    old = _raise_recursion_limit(limit)
    try:
        rec(0, 0, 0.0)
    finally:
        _restore_recursion_limit(old)
    if state["labels"] is None:
        raise BudgetError("no partition found below the supplied upper bound")
    part = Partition(state["labels"], K).canonical()
    return KMeansResult(part, kmeans_criterion(Y, part), not state["timed_out"], state["nodes"])


def _raise_recursion_limit(limit: int) -> int:
    old = sys.getrecursionlimit()
    if limit > old:
        sys.setrecursionlimit(limit)
    return old


def _restore_recursion_limit(old: int):
    sys.setrecursionlimit(old)


def kmeans_bruteforce(data, K: int) -> KMeansResult:
    """Unpruned enumeration of all set partitions into at most ``K`` blocks."""
    Y = np.asarray(data, dtype=np.float64)
    best, best_rgs, count = math.inf, None, 0
    for rgs in restricted_growth_strings(Y.shape[0], K):
        count += 1
        crit = kmeans_criterion(Y, Partition(np.array(rgs, dtype=np.int64), K))
        if crit < best:
            best, best_rgs = crit, rgs
    part = Partition(np.array(best_rgs, dtype=np.int64), K)
    return KMeansResult(part, best, True, count)


def _kmeanspp(Y: np.ndarray, K: int, gen: np.random.Generator) -> np.ndarray:
    n = Y.shape[0]
    centers = [Y[gen.integers(n)]]
    d2 = ((Y - centers[0]) ** 2).sum(axis=1)
    for _ in range(1, K):
        total = d2.sum()
        if total <= 0:
            idx = gen.integers(n)
        else:
            idx = gen.choice(n, p=d2 / total)
        centers.append(Y[idx])
        d2 = np.minimum(d2, ((Y - Y[idx]) ** 2).sum(axis=1))
    return np.array(centers)


def _sq_dists(Y: np.ndarray, C: np.ndarray) -> np.ndarray:
    return ((Y[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)


def lloyd_run(Y: np.ndarray, K: int, max_iters: int, gen: np.random.Generator):
    """One seeded Lloyd descent; returns ``(labels, criterion history)``."""
    centers = _kmeanspp(Y, K, gen)
    labels = _sq_dists(Y, centers).argmin(axis=1)
    history = []
    for _ in range(max_iters):
        counts = np.bincount(labels, minlength=K)
        for k in np.flatnonzero(counts == 0):
            # reseed an empty cluster from the point farthest from its centre
            resid = ((Y - centers[labels]) ** 2).sum(axis=1)
            resid[counts[labels] <= 1] = -1.0
            far = int(resid.argmax())
            counts[labels[far]] -= 1
            labels[far] = k
            counts[k] = 1
        centers = np.array([Y[labels == k].mean(axis=0) for k in range(K)])
        history.append(float(((Y - centers[labels]) ** 2).sum()))
        new = _sq_dists(Y, centers).argmin(axis=1)
        if np.array_equal(new, labels):
            break
        labels = new
    return labels, history


def lloyd(data, K: int, restarts: int = 10, max_iters: int = 100, seed: int = 0) -> Partition:
    """Best of ``restarts`` Lloyd runs seeded by k-means++."""
    Y = np.asarray(data, dtype=np.float64)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    n = Y.shape[0]
    K_eff = min(K, n)
    best, best_labels = math.inf, None
    for r in range(restarts):
        labels, _ = lloyd_run(Y, K_eff, max_iters, _rng.stream(seed, _rng.ALGORITHM, r))
        crit = kmeans_criterion(Y, Partition(labels, K_eff))
        if crit < best * (1 - REL_TOL):
            best, best_labels = crit, labels
    return Partition(best_labels, K).canonical()


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _pairwise_sq(Y: np.ndarray) -> np.ndarray:
    # per-pair differences, so a value never depends on row order
    return squareform(pdist(Y, "sqeuclidean"))


def single_linkage(data, K: int) -> Partition:
    """Agglomerative clustering with single linkage, stopped at ``K`` groups.

    Merging the two groups at minimal single linkage is the same as adding
    edges in increasing length and skipping those inside a group, so the
    merges are replayed from one sorted edge list. Ties go to the
    lexicographically smallest ``(i, j)``.
    """
    Y = np.asarray(data, dtype=np.float64)
    n = Y.shape[0]
    if K > n:
        raise ValueError(f"K={K} exceeds n={n}")
    if K < 1:
        raise ValueError("K must be >= 1")
    d2 = _pairwise_sq(Y)
    iu, ju = np.triu_indices(n, k=1)
    order = np.lexsort((ju, iu, d2[iu, ju]))
    uf = _UnionFind(n)
    groups = n
    for e in order:
        if groups == K:
            break
        if uf.union(int(iu[e]), int(ju[e])):
            groups -= 1
    roots = np.array([uf.find(i) for i in range(n)])
    return Partition(Partition(roots, n).canonical().labels, K)


def single_linkage_naive(data, K: int) -> Partition:
    """Literal merge loop over groups; O(n^4), for tests."""
    Y = np.asarray(data, dtype=np.float64)
    n = Y.shape[0]
    d2 = _pairwise_sq(Y)
    groups = [[i] for i in range(n)]
    while len(groups) > K:
        best = None
        for a in range(len(groups)):
            for b in range(a + 1, len(groups)):
                link = min((d2[i, j], min(i, j), max(i, j)) for i in groups[a] for j in groups[b])
                if best is None or link < best[0]:
                    best = (link, a, b)
        _, a, b = best
        groups[a] = sorted(groups[a] + groups[b])
        del groups[b]
    return Partition(Partition.from_groups(groups, n).canonical().labels, K)


def spectral_cluster(data, K: int, seed: int = 0, restarts: int = 10) -> Partition:
    """Lloyd on the rows of the top-``K`` eigenvectors of the Gram matrix ``Y Y^T``.

    Eigenvectors are weighted by the square root of their eigenvalue, so the
    embedding is the rank-``K`` projection of the rows and directions from
    the null space carry no weight.
    """
    Y = np.asarray(data, dtype=np.float64)
    n = Y.shape[0]
    if K > n:
        raise ValueError(f"K={K} exceeds n={n}")
    try:
        vals, vecs = np.linalg.eigh(Y @ Y.T)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError("eigensolver failed on degenerate input") from exc
    top = np.argsort(vals)[::-1][:K]
    embedding = vecs[:, top] * np.sqrt(np.clip(vals[top], 0.0, None))
    return lloyd(embedding, K, restarts=restarts, seed=seed)


ALGORITHMS = ("exact_kmeans", "lloyd", "single_linkage", "spectral")


def run_algorithm(name: str, data, K: int, seed: int = 0, time_budget: float | None = None) -> Partition:
    if name == "exact_kmeans":
        return exact_kmeans(data, K, time_budget=time_budget).partition
    if name == "lloyd":
        return lloyd(data, K, seed=seed)
    if name == "single_linkage":
        return single_linkage(data, K)
    if name == "spectral":
        return spectral_cluster(data, K, seed=seed)
    raise ValueError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
