"""Exact-recovery rate as a function of the separation, on packing means."""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import isotonic_regression

from .. import rng as _rng
from ..cluster import run_algorithm
from ..metrics import misclassification_error
from ..model import hypercube_packing, sample_fixed_means
from ..partition import Partition


@dataclass(frozen=True)
class RecoveryPoint:
    delta_bar_sq: float
    exact_recovery_rate: float
    trials: int
    mean_err: float


def _trial(means, labels, sigma, algorithm, K, seed, time_budget):
    inst = sample_fixed_means(means, labels, sigma, seed)
    est = run_algorithm(algorithm, inst.data, K, seed=_rng.mix_seed(seed, 1), time_budget=time_budget)
    return misclassification_error(est, labels)


def recovery_curve(n: int, p: int, K: int, delta_grid, algorithm: str, trials: int,
                   seed: int = 0, sigma: float = 1.0, threads: int = 1,
                   time_budget: float | None = None) -> list[RecoveryPoint]:
    """Fraction of trials with ``err == 0`` at each grid value.

    Means are the packing vertices scaled to ``delta_bar_sq`` (so the actual
    separation lies between it and four times it); labels cycle through
    the groups. Trial seeds depend only on ``(seed, grid index, trial)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    labels = Partition([i % K for i in range(n)], K)
    points = []
    for g, dbs in enumerate(delta_grid):
        means = hypercube_packing(K, p, float(dbs), sigma)
        seeds = [_rng.mix_seed(seed, g, t) for t in range(trials)]
        args = [(means, labels, sigma, algorithm, K, s, time_budget) for s in seeds]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                errs = list(pool.map(lambda a: _trial(*a), args))
        else:
            errs = [_trial(*a) for a in args]
        errs = np.array(errs)
        points.append(RecoveryPoint(float(dbs), float(np.mean(errs == 0.0)), trials, float(errs.mean())))
    return points


def isotonic_residual(values) -> float:
    """Largest gap between a sequence and its best non-decreasing fit."""
    y = np.asarray(values, dtype=np.float64)
    if y.size == 0:
        return 0.0
    fit = isotonic_regression(y, increasing=True).x
    return float(np.max(np.abs(y - fit)))


def curve_to_csv(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["delta_bar_sq", "exact_recovery_rate", "trials", "mean_err"])
    for pt in points:
        w.writerow([repr(pt.delta_bar_sq), repr(pt.exact_recovery_rate), pt.trials, repr(pt.mean_err)])
    return buf.getvalue()
