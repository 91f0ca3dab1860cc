"""Monte Carlo and regression oracles for the exact low-degree quantities."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .. import rng as _rng
from .alpha import AlphaMatrix

FEATURE_BUDGET = 2000


def mc_moment(gamma: AlphaMatrix, K: int, eps: float, samples: int, seed: int = 0,
              chunk: int = 200_000) -> tuple[float, float]:
    """Monte Carlo estimate of ``E[X^gamma]`` under the noiseless hypercube prior.

    Each draw samples labels for the support rows and a sign matrix for the
    ``K`` means, then evaluates the monomial. Returns ``(mean, stderr)``.
    """
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    if gamma.is_zero():
        return 1.0, 0.0
    rows, cols = gamma.rows(), gamma.cols()
    ri = {i: t for t, i in enumerate(rows)}
    ci = {j: t for t, j in enumerate(cols)}
    odd = [(ri[i], ci[j]) for i, j, m in gamma.entries if m % 2]
    scale = eps**gamma.size
    gen = _rng.stream(seed, _rng.MEANS, 0)
    total, total_sq, done = 0.0, 0.0, 0
    while done < samples:
        b = min(chunk, samples - done)
        labels = gen.integers(0, K, size=(b, len(rows)))
        bits = gen.integers(0, 2, size=(b, K, len(cols)), dtype=np.int8)
        parity = np.zeros(b, dtype=np.int8)
        idx = np.arange(b)
        for r, c in odd:
            parity ^= bits[idx, labels[:, r], c]
        vals = scale * (1.0 - 2.0 * parity)
        total += float(vals.sum())
        total_sq += float((vals * vals).sum())
        done += b
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / samples)


def monomial_features(Y: np.ndarray, D: int) -> np.ndarray:
    """All monomials of total degree ``<= D`` in the columns of ``Y`` (constant included)."""
    S, v = Y.shape
    cols = [np.ones(S)]
    for d in range(1, D + 1):
        for combo in itertools.combinations_with_replacement(range(v), d):
            cols.append(np.prod(Y[:, combo], axis=1))
    return np.column_stack(cols)


def feature_count(n: int, p: int, D: int) -> int:
    return math.comb(n * p + D, D)


def empirical_mmse(n: int, p: int, K: int, delta_bar_sq: float, D: int, samples: int,
                   seed: int = 0, train_frac: float = 0.7, bootstrap: int = 200,
                   feature_budget: int = FEATURE_BUDGET) -> tuple[float, float]:
    """Held-out squared error of the best degree-``D`` polynomial fit of ``1{k_0 = k_1}``.

    Data follow the hypercube prior with unit noise. The least-squares fit on
    the training split is scored on the rest; the standard error comes from a
    bootstrap over held-out squared errors. An upper proxy for the degree-``D``
    MMSE, up to estimation error.
    """
    nf = feature_count(n, p, D)
    if nf > feature_budget:
        raise ValueError(f"{nf} monomial features exceed the budget {feature_budget}")
    if samples < 10 * nf or samples < 20:
        raise ValueError(f"need at least {max(10 * nf, 20)} samples for {nf} features")
    if n < 2:
        raise ValueError("need n >= 2")
    gen = _rng.stream(seed, _rng.LABELS, 0)
    eps = math.sqrt(delta_bar_sq / p)
    labels = gen.integers(0, K, size=(samples, n))
    signs = 2.0 * gen.integers(0, 2, size=(samples, K, p)) - 1.0
    X = eps * np.take_along_axis(signs, labels[:, :, None], axis=1)
    Y = (X + _rng.stream(seed, _rng.NOISE, 0).standard_normal((samples, n, p))).reshape(samples, n * p)
    x = (labels[:, 0] == labels[:, 1]).astype(np.float64)

    F = monomial_features(Y, D)
    n_train = int(train_frac * samples)
    Ftr, Fte, xtr, xte = F[:n_train], F[n_train:], x[:n_train], x[n_train:]
    try:
        coef, *_ = np.linalg.lstsq(Ftr, xtr, rcond=None)
    except np.linalg.LinAlgError:
        # documented ridge fallback
        A = Ftr.T @ Ftr + 1e-10 * np.eye(Ftr.shape[1])
        coef = np.linalg.solve(A, Ftr.T @ xtr)
    sq = (Fte @ coef - xte) ** 2
    est = float(sq.mean())
    boot = _rng.stream(seed, _rng.ALGORITHM, 0)
    idx = boot.integers(0, sq.size, size=(bootstrap, sq.size))
    stderr = float(sq[idx].mean(axis=1).std(ddof=1))
    return est, stderr
