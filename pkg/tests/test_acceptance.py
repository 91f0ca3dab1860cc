"""End-to-end acceptance checks; each prints one ACCEPTANCE line with PASS or FAIL."""
from __future__ import annotations

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from clustergap.cluster import exact_kmeans, kmeans_bruteforce
from clustergap.lab import SweepConfig, isotonic_residual, records_to_csv, recovery_curve, run_sweep
from clustergap.lowdegree import (AlphaMatrix, certified_corr_sq_upper, check_cumulant_bounds,
                                  check_filter_exactness, check_moment_bounds, check_numbergroups,
                                  corr_bound_sum, empirical_mmse, grid_size, mc_moment, moment,
                                  bound_report, zeta_n)
from clustergap.metrics import (err_l1_bound, err_vs_partnership_check, misclassification_error,
                                misclassification_error_bruteforce)
from clustergap.partition import Partition


def announce(capsys, number: int, ok: bool, detail: str):
    with capsys.disabled():
        print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def test_1_null_cumulant_filter_is_exact(capsys):
    t0 = time.perf_counter()
    tally = check_filter_exactness(3, 2, 4, Ks=(2, 3, 4))
    secs = time.perf_counter() - t0
    detail = (f"filtered-out alphas with zero shortcut-free cumulant: {tally.checked} checks "
              f"({grid_size(3, 2, 4) - 1} matrices x 3 K), violations={len(tally.violations)}, {secs:.1f}s")
    announce(capsys, 1, tally.ok and tally.checked > 0 and secs <= 60, detail)


def _random_gamma(gen, m=4, r=3, max_size=6):
    size = int(gen.integers(1, max_size + 1))
    cells: dict = {}
    for _ in range(size):
        c = (int(gen.integers(0, m)), int(gen.integers(0, r)))
        cells[c] = cells.get(c, 0) + 1
    return AlphaMatrix.from_dict(cells)


def test_2_monte_carlo_matches_exact_moments(capsys):
    gen = np.random.default_rng(20240)
    t0 = time.perf_counter()
    hits, worst = 0, 0.0
    for i in range(50):
        g = _random_gamma(gen)
        K = int(gen.integers(2, 4))
        exact = float(moment(g, K).at(Fraction(1)))
        est, se = mc_moment(g, K, 1.0, 10**6, seed=i)
        z = abs(est - exact) / se if se > 0 else (0.0 if abs(est - exact) <= 1e-12 else math.inf)
        worst = max(worst, z)
        hits += abs(est - exact) <= 4 * se + 1e-12
    secs = time.perf_counter() - t0
    announce(capsys, 2, hits >= 48 and secs <= 300,
             f"{hits}/50 within 4 se at 1e6 samples (worst |z|={worst:.2f}), {secs:.1f}s")


@pytest.mark.slow
def test_3_exhaustive_moment_cumulant_group_bounds(capsys):
    t0 = time.perf_counter()
    mom = check_moment_bounds(5, 3, 8, Ks=(2, 3, 4))
    cum = check_cumulant_bounds(5, 3, 5, Ks=(2, 3, 4))
    grp = check_numbergroups(5, 3, 8)
    secs = time.perf_counter() - t0
    ok = all(t.ok and t.checked > 0 for t in (mom, cum, grp)) and secs <= 600
    detail = (f"moment {mom.checked} checks/{len(mom.violations)} viol, "
              f"cumulant {cum.checked}/{len(cum.violations)}, "
              f"groups {grp.checked}/{len(grp.violations)}, {secs:.0f}s")
    announce(capsys, 3, ok, detail)


def _largest_dyadic_below_half(n, p, K, D):
    d = Fraction(1)
    while zeta_n(n, p, K, d, D) >= Fraction(1, 2):
        d /= 2
    return d


def test_4_low_degree_chain_consistency(capsys):
    t0 = time.perf_counter()
    parts, ok = [], True
    for n, p, K, D in [(2, 2, 2, 2), (2, 2, 2, 3), (3, 3, 2, 2), (3, 3, 3, 2)]:
        dbs = _largest_dyadic_below_half(n, p, K, D)
        zeta = zeta_n(n, p, K, dbs, D)
        lhs = corr_bound_sum(n, p, D, K, dbs / p)
        rhs = certified_corr_sq_upper(zeta, K)
        ok &= zeta < Fraction(1, 2) and lhs <= rhs
        parts.append(f"({n},{p},{K},{D}) dbs={dbs} zeta={float(zeta):.3f} sum={float(lhs):.6f}<=rhs={float(rhs):.4f}")
    # 0.1 is the required point, where the bound is vacuous; 0.005 is where it has content
    for dbs in (0.1, 0.005):
        est, se = empirical_mmse(4, 4, 2, dbs, 2, 50_000, seed=0)
        rep = bound_report(4, 4, 2, dbs, 2)
        ok &= est >= rep.mmse_lower - 3 * se
        parts.append(f"dbs={dbs} zeta={rep.zeta:.3f} empirical {est:.4f}+-{se:.4f} >= lower {rep.mmse_lower:.4f} - 3se")
    secs = time.perf_counter() - t0
    announce(capsys, 4, ok and secs <= 900, "; ".join(parts) + f"; {secs:.1f}s")


def test_5_metric_oracles(capsys):
    gen = np.random.default_rng(5)
    mismatch = 0
    for _ in range(1000):
        K, n = int(gen.integers(1, 6)), int(gen.integers(1, 41))
        g, h = Partition(gen.integers(0, K, n), K), Partition(gen.integers(0, K, n), K)
        mismatch += misclassification_error(g, h) != misclassification_error_bruteforce(g, h)
    viol_pm = viol_l1 = 0
    for _ in range(1000):
        K = int(gen.integers(1, 6))
        n = K * int(gen.integers(1, 9))
        lab = np.arange(n) % K
        gen.shuffle(lab)
        g_star, g = Partition(lab, K), Partition(gen.integers(0, K, n), K)
        lhs, rhs = err_vs_partnership_check(g, g_star)
        viol_pm += lhs > rhs + 1e-12
        err, bound = err_l1_bound(g, g_star)
        viol_l1 += err > bound + 1e-12
    ok = mismatch == 0 and viol_pm == 0 and viol_l1 == 0
    announce(capsys, 5, ok, f"hungarian mismatches={mismatch}/1000, partnership<=2err violations={viol_pm}, "
                            f"err<=l1 violations={viol_l1}")


def test_6_branch_and_bound_matches_enumeration(capsys):
    gen = np.random.default_rng(6)
    bad = 0
    for _ in range(200):
        n, K, p = int(gen.integers(1, 11)), int(gen.integers(1, 4)), int(gen.integers(1, 4))
        Y = gen.standard_normal((n, p))
        a, b = exact_kmeans(Y, K), kmeans_bruteforce(Y, K)
        bad += not (a.partition.same_as(b.partition) or a.criterion == b.criterion)
    announce(capsys, 6, bad == 0, f"{200 - bad}/200 instances with identical optimum")


def test_7_recovery_phase_behavior(capsys):
    n, p, K = 48, 192, 3
    hi = 40 * (math.log(n) + math.sqrt(p * math.log(n))) / 10
    grid = [0.1, hi / 8, hi / 4, hi / 2, hi]
    t0 = time.perf_counter()
    ok, parts = True, []
    for alg in ("single_linkage", "lloyd"):
        pts = recovery_curve(n, p, K, grid, alg, trials=100, seed=7)
        rates = [pt.exact_recovery_rate for pt in pts]
        resid = isotonic_residual(rates)
        ok &= rates[0] <= 0.05 and rates[-1] >= 0.95 and resid <= 0.05
        parts.append(f"{alg} rates={rates} resid={resid:.3f}")
    secs = time.perf_counter() - t0
    announce(capsys, 7, ok and secs <= 1200, f"grid top {hi:.2f}; " + "; ".join(parts) + f"; {secs:.1f}s")


def test_8_sweep_csv_is_thread_independent(capsys):
    c = SweepConfig(n=(10, 24), p=(8,), K=(2, 3), delta_bar_sq=(0.5, 8.0),
                    algorithms=("exact_kmeans", "lloyd", "single_linkage", "spectral"),
                    trials=3, seed=2**63 + 11, D=1)
    texts = [records_to_csv(run_sweep(c, threads=t)) for t in (1, 2, 4)]
    same = texts[0] == texts[1] == texts[2]
    announce(capsys, 8, same, f"{len(texts[0].splitlines()) - 1} rows, threads 1/2/4 byte-identical={same}")
