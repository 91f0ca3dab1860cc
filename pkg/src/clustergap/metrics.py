"""Partition comparison: misclassification error, partnership matrices, K-means criterion."""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment

from .partition import Partition

__all__ = [
    "Partition",
    "overlap_matrix",
    "misclassification_error",
    "misclassification_error_bruteforce",
    "partnership_matrix",
    "partnership_mse",
    "trivial_estimator",
    "normalized_partnership",
    "is_normalized_partnership",
    "b_l1_discrepancy",
    "kmeans_criterion",
    "err_vs_partnership_check",
    "err_l1_bound",
]


def _check_same_n(g: Partition, h: Partition):
    if g.n != h.n:
        raise ValueError(f"partitions have different sizes: {g.n} vs {h.n}")


def overlap_matrix(g: Partition, g_star: Partition) -> np.ndarray:
    """Square matrix ``C[k, l] = |G*_k & G_l|`` padded with zeros to ``max(K, K*)``."""
    _check_same_n(g, g_star)
    size = max(g.K, g_star.K)
    C = np.zeros((size, size), dtype=np.int64)
    np.add.at(C, (g_star.labels, g.labels), 1)
    return C


def misclassification_error(g: Partition, g_star: Partition) -> float:
    """``1 - max_pi sum_k |G*_k & G_pi(k)| / n`` via optimal assignment."""
    C = overlap_matrix(g, g_star)
    if g.n == 0:
        return 0.0
    rows, cols = linear_sum_assignment(C, maximize=True)
    return float(1.0 - C[rows, cols].sum() / g.n)


def misclassification_error_bruteforce(g: Partition, g_star: Partition) -> float:
    """Minimum over all label permutations; only for small ``K``."""
    C = overlap_matrix(g, g_star)
    size = C.shape[0]
    best = max(sum(C[k, perm[k]] for k in range(size)) for perm in itertools.permutations(range(size)))
    return float(1.0 - best / g.n)


def partnership_matrix(g: Partition) -> np.ndarray:
    return (g.labels[:, None] == g.labels[None, :]).astype(np.int64)


def partnership_mse(m_hat, m_star) -> float:
    """Off-diagonal mean squared difference, normalised by ``n(n-1)``."""
    m_hat = np.asarray(m_hat, dtype=np.float64)
    m_star = np.asarray(m_star, dtype=np.float64)
    if m_hat.shape != m_star.shape or m_hat.ndim != 2 or m_hat.shape[0] != m_hat.shape[1]:
        raise ValueError("partnership matrices must be square and of equal shape")
    n = m_hat.shape[0]
    if n < 2:
        return 0.0
    diff = m_hat - m_star
    np.fill_diagonal(diff, 0.0)
    return float((diff**2).sum() / (n * (n - 1)))


def trivial_estimator(n: int, K: int) -> np.ndarray:
    """Ones on the diagonal, ``1/K`` elsewhere."""
    m = np.full((n, n), 1.0 / K)
    np.fill_diagonal(m, 1.0)
    return m


def normalized_partnership(g: Partition, exact: bool = False) -> np.ndarray:
    """``B_ij = 1/|G_k|`` when ``i, j`` share group ``k``, else 0.

    With ``exact=True`` the entries are :class:`fractions.Fraction` (object array).
    """
    sizes = g.sizes()
    same = g.labels[:, None] == g.labels[None, :]
    if not exact:
        return np.where(same, 1.0 / sizes[g.labels][:, None], 0.0)
    n = g.n
    B = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            B[i, j] = Fraction(1, int(sizes[g.labels[i]])) if same[i, j] else Fraction(0)
    return B


def is_normalized_partnership(B: np.ndarray, atol: float = 0.0) -> bool:
    """Check symmetric, nonnegative, ``B 1 = 1``, ``B^2 = B``.

    ``atol=0`` demands exact equality, which is only meaningful for Fraction input.
    """
    n = B.shape[0]
    ones = np.ones(n, dtype=int)
    if B.dtype == object:
        sym = all(B[i, j] == B[j, i] for i in range(n) for j in range(n))
        nonneg = all(x >= 0 for x in B.flat)
        rows = all(s == 1 for s in B.dot(ones))
        proj = bool((B.dot(B) == B).all())
        return sym and nonneg and rows and proj
    return (
        np.allclose(B, B.T, atol=atol, rtol=0)
        and bool((B >= -atol).all())
        and np.allclose(B @ ones, 1.0, atol=atol, rtol=0)
        and np.allclose(B @ B, B, atol=atol, rtol=0)
    )


def b_l1_discrepancy(g_star: Partition, g: Partition, exact: bool = False):
    """Entrywise l1 norm of ``B* - B* B``.

    Also evaluates the cross-block form ``2 sum_{k != l} |B_{G*_k, G*_l}|_1``
    and raises if the two disagree (beyond 1e-10 in float mode).
    """
    _check_same_n(g, g_star)
    B_star = normalized_partnership(g_star, exact)
    B = normalized_partnership(g, exact)
    direct = np.abs(B_star - B_star.dot(B)).sum()
    cross_mask = g_star.labels[:, None] != g_star.labels[None, :]
    cross = 2 * np.abs(B[cross_mask]).sum()
    if exact:
        direct, cross = Fraction(direct), Fraction(cross)
        if direct != cross:
            raise AssertionError(f"l1 identity failed: {direct} != {cross}")
        return direct
    if abs(direct - cross) > 1e-10 * max(1.0, abs(direct)):
        raise AssertionError(f"l1 identity failed: {direct} != {cross}")
    return float(direct)


def kmeans_criterion(data, g: Partition) -> float:
    """Sum over groups of squared distances to the group mean.

    Unused labels contribute nothing.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.shape[0] != g.n:
        raise ValueError("data rows do not match partition size")
    total = 0.0
    for k in np.unique(g.labels):
        block = data[g.labels == k]
        total += float(((block - block.mean(axis=0)) ** 2).sum())
    return total


def err_vs_partnership_check(g: Partition, g_star: Partition) -> tuple[float, float]:
    """Return ``(||M^G - M*||_F^2 / (n(n-1)), 2 err(G, G*))``; the first never exceeds the second."""
    _check_same_n(g, g_star)
    lhs = partnership_mse(partnership_matrix(g), partnership_matrix(g_star))
    return lhs, 2.0 * misclassification_error(g, g_star)


def err_l1_bound(g: Partition, g_star: Partition) -> tuple[float, float]:
    """Return ``(err(G, G*), 2 (m+/m) ||B* - B* B||_1 / n)`` with ``m, m+`` from ``G*``."""
    sizes = g_star.sizes()
    sizes = sizes[sizes > 0]
    ratio = sizes.max() / sizes.min()
    rhs = 2.0 * ratio * b_l1_discrepancy(g_star, g) / g.n
    return misclassification_error(g, g_star), float(rhs)
