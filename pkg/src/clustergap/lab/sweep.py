"""Deterministic experiment sweeps and their CSV form."""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .. import rng as _rng
from ..cluster import ALGORITHMS, BudgetError, run_algorithm
from ..metrics import misclassification_error, partnership_matrix, partnership_mse
from ..model import (PackingError, Prior, hypercube_packing, sample_bernoulli_prior,
                     sample_fixed_means, sample_gaussian_prior)
from ..partition import Partition
from ..lowdegree.bounds import bound_report
from .config import SweepConfig

COLUMNS = ["n", "p", "K", "delta_bar_sq", "algorithm", "trial", "seed",
           "err", "partnership_mse", "runtime_ms", "flags"]
BOUND_COLUMNS = ["zeta", "mmse_lower"]
EXACT_N_MAX = 14


@dataclass(frozen=True)
class SweepRecord:
    n: int
    p: int
    K: int
    delta_bar_sq: float
    algorithm: str
    trial: int
    seed: int
    err: float | None
    partnership_mse: float | None
    runtime_ms: float | None = None
    flags: str = ""
    zeta: float | None = None
    mmse_lower: float | None = None
    cell: int = 0


def regime_label(n: int, p: int, K: int, delta_bar_sq: float) -> str:
    """Place a nominal separation in the impossible / hard / easy table.

    Easy above ``sqrt(p K^2 / n) ^ sqrt(p log n)``; impossible below
    ``sqrt(p K log K / n) v log K``; hard in between. Easy is tested first.
    """
    easy = min(math.sqrt(p * K * K / n), math.sqrt(p * math.log(n))) if n > 1 else 0.0
    impossible = max(math.sqrt(p * K * math.log(K) / n), math.log(K))
    if delta_bar_sq >= easy:
        return "easy"
    if delta_bar_sq <= impossible:
        return "impossible"
    return "hard"


def instance_seed(master: int, cell: int, trial: int) -> int:
    return _rng.mix_seed(master, cell, trial)


def algorithm_seed(inst_seed: int, algorithm: str) -> int:
    return _rng.mix_seed(inst_seed, ALGORITHMS.index(algorithm))


def make_instance(prior: str, n: int, p: int, K: int, delta_bar_sq: float, sigma: float, seed: int):
    prior = Prior(prior)
    if prior is Prior.BERNOULLI_HYPERCUBE:
        return sample_bernoulli_prior(n, p, K, delta_bar_sq, sigma, seed)
    if prior is Prior.GAUSSIAN_PRIOR:
        return sample_gaussian_prior(n, p, K, delta_bar_sq, sigma, seed)
    # fixed means: packing vertices with labels cycling through the groups
    means = hypercube_packing(K, p, delta_bar_sq, sigma)
    labels = Partition([i % K for i in range(n)], K)
    inst = sample_fixed_means(means, labels, sigma, seed)
    return replace(inst, delta_bar_sq=float(delta_bar_sq))


def _run_task(config: SweepConfig, cell: int, params, trial: int, record_runtime: bool) -> list[SweepRecord]:
    n, p, K, dbs = params
    seed = instance_seed(config.seed, cell, trial)
    base_flags = [f"regime={regime_label(n, p, K, dbs)}"]
    extra = {}
    if config.D is not None:
        rep = bound_report(n, p, K, dbs, config.D,
                           "gaussian" if config.prior == Prior.GAUSSIAN_PRIOR.value else "bernoulli")
        extra = {"zeta": rep.zeta if p >= n else rep.zeta_bar, "mmse_lower": rep.mmse_lower}
    out = []
    try:
        inst = make_instance(config.prior, n, p, K, dbs, config.sigma, seed)
    except PackingError:
        for alg in config.algorithms:
            out.append(SweepRecord(n, p, K, dbs, alg, trial, seed, None, None, None,
                                   ";".join(base_flags + ["skipped=packing"]), cell=cell, **extra))
        return out
    m_star = partnership_matrix(inst.labels)
    for alg in config.algorithms:
        flags = list(base_flags)
        if alg == "exact_kmeans" and n > EXACT_N_MAX and config.time_budget is None:
            flags.append("skipped=infeasible")
            out.append(SweepRecord(n, p, K, dbs, alg, trial, seed, None, None, None,
                                   ";".join(flags), cell=cell, **extra))
            continue
        if K > n and alg in ("single_linkage", "spectral"):
            flags.append("skipped=infeasible")
            out.append(SweepRecord(n, p, K, dbs, alg, trial, seed, None, None, None,
                                   ";".join(flags), cell=cell, **extra))
            continue
        t0 = time.perf_counter()
        try:
            est = run_algorithm(alg, inst.data, K, seed=algorithm_seed(seed, alg),
                                time_budget=config.time_budget)
        except BudgetError:
            flags.append("skipped=budget")
            out.append(SweepRecord(n, p, K, dbs, alg, trial, seed, None, None, None,
                                   ";".join(flags), cell=cell, **extra))
            continue
        elapsed = (time.perf_counter() - t0) * 1000.0
        err = misclassification_error(est, inst.labels)
        mse = partnership_mse(partnership_matrix(est), m_star)
        out.append(SweepRecord(n, p, K, dbs, alg, trial, seed, err, mse,
                               elapsed if record_runtime else None, ";".join(flags),
                               cell=cell, **extra))
    return out


def run_sweep(config: SweepConfig, threads: int = 1, record_runtime: bool = False) -> list[SweepRecord]:
    """One record per (cell, algorithm, trial), in that sort order.

    Tasks are independent given their derived seeds, so the result does not
    depend on ``threads``. Wall-clock runtimes are only recorded on request,
    keeping the default output byte-reproducible.
    """
    tasks = [(cell, params, trial) for cell, params in enumerate(config.cells())
             for trial in range(config.trials)]
    if threads <= 1:
        chunks = [_run_task(config, c, prm, t, record_runtime) for c, prm, t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda a: _run_task(config, *a, record_runtime), tasks))
    records = [r for chunk in chunks for r in chunk]
    order = {a: i for i, a in enumerate(config.algorithms)}
    records.sort(key=lambda r: (r.cell, order[r.algorithm], r.trial))
    return records


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def records_to_csv(records, with_bounds: bool | None = None) -> str:
    if with_bounds is None:
        with_bounds = any(r.zeta is not None for r in records)
    cols = COLUMNS + (BOUND_COLUMNS if with_bounds else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in cols])
    return buf.getvalue()


def _parse_opt_float(s: str):
    return None if s == "" else float(s)


def read_csv(text: str) -> list[SweepRecord]:
    """Parse :func:`records_to_csv` output; the cell index is recovered from row order."""
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    if header[: len(COLUMNS)] != COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    out = []
    cells: dict[tuple, int] = {}
    for row in reader:
        key = (row["n"], row["p"], row["K"], row["delta_bar_sq"])
        cell = cells.setdefault(key, len(cells))
        out.append(SweepRecord(
            n=int(row["n"]), p=int(row["p"]), K=int(row["K"]),
            delta_bar_sq=float(row["delta_bar_sq"]), algorithm=row["algorithm"],
            trial=int(row["trial"]), seed=int(row["seed"]),
            err=_parse_opt_float(row["err"]),
            partnership_mse=_parse_opt_float(row["partnership_mse"]),
            runtime_ms=_parse_opt_float(row["runtime_ms"]), flags=row["flags"],
            zeta=_parse_opt_float(row.get("zeta", "") or ""),
            mmse_lower=_parse_opt_float(row.get("mmse_lower", "") or ""),
            cell=cell,
        ))
    return out


def write_csv(records, path: str | Path, with_bounds: bool | None = None) -> str:
    text = records_to_csv(records, with_bounds)
    Path(path).write_text(text)
    return text
