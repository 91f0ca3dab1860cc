"""Invariant suites for every module, reported as machine-readable pass/fail.

Implementations can be swapped through ``impls`` so that a deliberately
broken function can be shown to produce a counterexample.
"""
from __future__ import annotations

import itertools
import time
from fractions import Fraction

import numpy as np

from .. import cluster, metrics, model
from ..lowdegree import alpha as _alpha
from ..lowdegree import bounds as _bounds
from ..lowdegree import moments as _moments
from ..partition import Partition

SUITES = ("model", "metrics", "cluster", "lowdegree", "all")


def _rand_partition(gen, n, K):
    return Partition(gen.integers(0, K, size=n), K)


def _rand_gamma(gen, n_rows, n_cols, max_size):
    size = int(gen.integers(1, max_size + 1))
    cells = gen.integers(0, n_rows * n_cols, size=size)
    d = {}
    for c in cells:
        key = (int(c) // n_cols, int(c) % n_cols)
        d[key] = d.get(key, 0) + 1
    return _alpha.AlphaMatrix.from_dict(d)


# each check returns (checked, counterexample or None)

def _check_packing(impl, gen):
    count = 0
    for K, p in [(2, 4), (4, 16), (5, 24), (3, 192), (8, 40)]:
        for dbs in (0.5, 2.0):
            M = impl["hypercube_packing"](K, p, dbs)
            for a, b in itertools.combinations(range(K), 2):
                count += 1
                half = float(((M[a] - M[b]) ** 2).sum()) / 2.0
                if not (dbs * (1 - 1e-12) <= half <= 4 * dbs * (1 + 1e-12)):
                    return count, {"K": K, "p": p, "delta_bar_sq": dbs, "pair": [a, b], "half_sq": half}
    return count, None


def _check_determinism(impl, gen):
    a = impl["sample_bernoulli_prior"](12, 5, 3, 1.0, 1.0, 99)
    b = impl["sample_bernoulli_prior"](12, 5, 3, 1.0, 1.0, 99)
    if not (np.array_equal(a.data, b.data) and np.array_equal(a.labels.labels, b.labels.labels)):
        return 1, {"seed": 99}
    return 1, None


def _check_hungarian(impl, gen):
    for t in range(200):
        K = int(gen.integers(1, 6))
        n = int(gen.integers(1, 41))
        g, h = _rand_partition(gen, n, K), _rand_partition(gen, n, int(gen.integers(1, 6)))
        a = impl["misclassification_error"](g, h)
        b = metrics.misclassification_error_bruteforce(g, h)
        if abs(a - b) > 1e-12:
            return t + 1, {"g": g.labels.tolist(), "h": h.labels.tolist(), "fast": a, "brute": b}
    return 200, None


def _check_pseudometric(impl, gen):
    err = impl["misclassification_error"]
    for t in range(200):
        n, K = int(gen.integers(1, 25)), int(gen.integers(1, 5))
        a, b, c = (_rand_partition(gen, n, K) for _ in range(3))
        ab, ba, bc, ac = err(a, b), err(b, a), err(b, c), err(a, c)
        if not (0 <= ab <= 1 and abs(ab - ba) < 1e-12 and ac <= ab + bc + 1e-12 and err(a, a) == 0):
            return t + 1, {"a": a.labels.tolist(), "b": b.labels.tolist(), "c": c.labels.tolist()}
    return 200, None


def _check_err_partnership(impl, gen):
    for t in range(200):
        n, K = int(gen.integers(2, 30)), int(gen.integers(1, 6))
        g, h = _rand_partition(gen, n, K), _rand_partition(gen, n, K)
        lhs, rhs = metrics.err_vs_partnership_check(g, h)
        if lhs > rhs + 1e-12:
            return t + 1, {"g": g.labels.tolist(), "g_star": h.labels.tolist(), "lhs": lhs, "rhs": rhs}
    return 200, None


def _balanced(gen, n, K):
    labels = np.arange(n) % K
    gen.shuffle(labels)
    return Partition(labels, K)


def _check_err_l1(impl, gen):
    for t in range(200):
        K = int(gen.integers(1, 5))
        n = K * int(gen.integers(1, 8)) + int(gen.integers(0, K))
        g_star = _balanced(gen, n, K)
        # both partitions over the same K labels, as the inequality requires
        g = _rand_partition(gen, n, K)
        err, rhs = metrics.err_l1_bound(g, g_star)
        if err > rhs + 1e-12:
            return t + 1, {"g": g.labels.tolist(), "g_star": g_star.labels.tolist(), "err": err, "rhs": rhs}
    return 200, None


def _check_projection(impl, gen):
    for t in range(50):
        n, K = int(gen.integers(1, 9)), int(gen.integers(1, 4))
        g = _rand_partition(gen, n, K)
        B = metrics.normalized_partnership(g, exact=True)
        if not metrics.is_normalized_partnership(B) or sum(B[i, i] for i in range(n)) != g.n_groups:
            return t + 1, {"g": g.labels.tolist()}
        try:
            metrics.b_l1_discrepancy(g, _rand_partition(gen, n, K), exact=True)
        except AssertionError as exc:
            return t + 1, {"g": g.labels.tolist(), "error": str(exc)}
    return 50, None


def _check_exact_kmeans(impl, gen):
    for t in range(30):
        n, K, p = int(gen.integers(1, 9)), int(gen.integers(1, 4)), int(gen.integers(1, 4))
        Y = gen.standard_normal((n, p))
        a = impl["exact_kmeans"](Y, K).criterion
        b = cluster.kmeans_bruteforce(Y, K).criterion
        if abs(a - b) > 1e-9 * max(1.0, b):
            return t + 1, {"data": Y.tolist(), "K": K, "search": a, "brute": b}
    return 30, None


def _check_lloyd(impl, gen):
    for t in range(30):
        n, K = int(gen.integers(2, 9)), int(gen.integers(1, 4))
        Y = gen.standard_normal((n, 2))
        crit = metrics.kmeans_criterion(Y, cluster.lloyd(Y, K, seed=t))
        best = cluster.exact_kmeans(Y, K).criterion
        _, hist = cluster.lloyd_run(Y, min(K, n), 100, np.random.default_rng(t))
        if crit < best * (1 - 1e-9) or any(b > a * (1 + 1e-12) + 1e-12 for a, b in zip(hist, hist[1:])):
            return t + 1, {"data": Y.tolist(), "K": K}
    return 30, None


def _check_single_linkage(impl, gen):
    for t in range(50):
        n = int(gen.integers(1, 12))
        K = int(gen.integers(1, n + 1))
        Y = np.round(gen.standard_normal((n, 2)), 1)
        a = impl["single_linkage"](Y, K)
        if not a.same_as(cluster.single_linkage_naive(Y, K)):
            return t + 1, {"data": Y.tolist(), "K": K}
        perm = gen.permutation(n)
        b = impl["single_linkage"](Y[perm], K)
        back = np.empty(n, dtype=np.int64)
        back[perm] = b.labels
        if not Partition(back, K).same_as(a):
            return t + 1, {"data": Y.tolist(), "K": K, "perm": perm.tolist()}
    return 50, None


def _check_parity(impl, gen):
    for t in range(60):
        g = _rand_gamma(gen, 4, 3, 6)
        K = int(gen.integers(1, 5))
        a = impl["parity_probability"](g, K)
        b = _moments.parity_probability_bruteforce(g, K)
        if a != b:
            return t + 1, {"gamma": _moments.encode_support(g), "K": K, "value": str(a), "brute": str(b)}
    return 60, None


def _check_filter(impl, gen):
    count = 0
    for a in _alpha.all_alphas(3, 2, 3, min_size=1):
        if impl["null_cumulant_filter"](a):
            continue
        for K in (2, 3):
            count += 1
            kap = _moments.cumulant(a, K, shortcut=False)
            if not kap.is_zero():
                return count, {"alpha": _moments.encode_support(a), "K": K, "kappa": str(kap)}
    return count, None


def _check_moment_bounds(impl, gen):
    count = 0
    for g in _alpha.all_alphas(4, 2, 4):
        for K in (2, 3):
            count += 1
            if not _bounds.moment_bound_holds(g, K):
                return count, {"gamma": _moments.encode_support(g), "K": K}
    return count, None


def _check_cumulant_bounds(impl, gen):
    count = 0
    for a in _alpha.all_alphas(4, 2, 4, min_size=1):
        if not _alpha.null_cumulant_filter(a):
            continue
        for K in (2, 3):
            count += 1
            kap = _moments.cumulant(a, K)
            if kap.d != a.size or not _bounds.cumulant_bound_holds(a, K, kap):
                return count, {"alpha": _moments.encode_support(a), "K": K, "kappa": str(kap)}
    return count, None


def _check_numbergroups(impl, gen):
    count = 0
    for g in _alpha.all_alphas(4, 3, 5, min_size=1):
        count += 1
        if not _bounds.numbergroups_check(g):
            return count, {"gamma": _moments.encode_support(g)}
    return count, None


def _check_corr_chain(impl, gen):
    n, p, K, D = 2, 2, 2, 2
    dbs = Fraction(1, 200)
    z = _bounds.zeta_n(n, p, K, dbs, D)
    s = _bounds.corr_bound_sum(n, p, D, K, dbs / p)
    if not (z < 1 and s <= _bounds.certified_corr_sq_upper(z, K)):
        return 1, {"n": n, "p": p, "K": K, "D": D, "sum": str(s), "zeta": str(z)}
    return 1, None


CHECKS = {
    "model": [("packing_separation", _check_packing), ("sampling_determinism", _check_determinism)],
    "metrics": [
        ("hungarian_vs_bruteforce", _check_hungarian),
        ("err_pseudometric", _check_pseudometric),
        ("partnership_le_2err", _check_err_partnership),
        ("err_le_l1_bound", _check_err_l1),
        ("normalized_partnership_exact", _check_projection),
    ],
    "cluster": [
        ("exact_kmeans_vs_bruteforce", _check_exact_kmeans),
        ("lloyd_descent_and_optimality_gap", _check_lloyd),
        ("single_linkage_naive_and_permutation", _check_single_linkage),
    ],
    "lowdegree": [
        ("parity_vs_bruteforce", _check_parity),
        ("filter_exactness", _check_filter),
        ("moment_bounds", _check_moment_bounds),
        ("cumulant_bounds_and_degree", _check_cumulant_bounds),
        ("numbergroups", _check_numbergroups),
        ("corr_sum_le_bound", _check_corr_chain),
    ],
}


def default_impls() -> dict:
    return {
        "hypercube_packing": model.hypercube_packing,
        "sample_bernoulli_prior": model.sample_bernoulli_prior,
        "misclassification_error": metrics.misclassification_error,
        "exact_kmeans": cluster.exact_kmeans,
        "single_linkage": cluster.single_linkage,
        "parity_probability": _moments.parity_probability,
        "null_cumulant_filter": _alpha.null_cumulant_filter,
    }


def verify(suite: str = "all", seed: int = 0, impls: dict | None = None) -> dict:
    """Run the invariant checks of ``suite``; a failing check carries its first counterexample."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    impl = default_impls()
    impl.update(impls or {})
    names = [s for s in SUITES[:-1]] if suite == "all" else [suite]
    t0 = time.perf_counter()
    results = []
    for name in names:
        for i, (check, fn) in enumerate(CHECKS[name]):
            gen = np.random.default_rng([seed, SUITES.index(name), i])
            t1 = time.perf_counter()
            try:
                checked, cex = fn(impl, gen)
            except Exception as exc:  # a crash is a failure, not an abort
                checked, cex = 0, {"exception": repr(exc)}
            entry = {"suite": name, "check": check, "ok": cex is None, "checked": checked,
                     "seconds": round(time.perf_counter() - t1, 3)}
            if cex is not None:
                entry["counterexample"] = cex
            results.append(entry)
    return {"suite": suite, "seed": seed, "passed": all(r["ok"] for r in results),
            "seconds": round(time.perf_counter() - t0, 3), "checks": results}
