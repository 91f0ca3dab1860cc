"""Exhaustive verification of the moment, cumulant and group-count bounds on small grids."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .alpha import all_alphas, count_alphas, null_cumulant_filter
from .bounds import cumulant_bound_holds, moment_bound_holds, numbergroups_check
from .moments import cumulant, encode_support


@dataclass
class CheckTally:
    name: str
    checked: int = 0
    violations: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"name": self.name, "checked": self.checked, "ok": self.ok,
                "violations": self.violations[:20], "seconds": round(self.seconds, 3)}


def check_moment_bounds(n: int, p: int, max_size: int, Ks=(2, 3), max_violations: int = 20) -> CheckTally:
    tally = CheckTally(f"moment_bound n={n} p={p} |g|<={max_size} K={list(Ks)}")
    t0 = time.perf_counter()
    for g in all_alphas(n, p, max_size):
        for K in Ks:
            tally.checked += 1
            if not moment_bound_holds(g, K):
                tally.violations.append({"gamma": encode_support(g), "K": K})
        if len(tally.violations) >= max_violations:
            break
    tally.seconds = time.perf_counter() - t0
    return tally


def check_numbergroups(n: int, p: int, max_size: int, max_violations: int = 20) -> CheckTally:
    tally = CheckTally(f"numbergroups n={n} p={p} |g|<={max_size}")
    t0 = time.perf_counter()
    for g in all_alphas(n, p, max_size, min_size=1):
        tally.checked += 1
        if not numbergroups_check(g):
            tally.violations.append({"gamma": encode_support(g)})
            if len(tally.violations) >= max_violations:
                break
    tally.seconds = time.perf_counter() - t0
    return tally


def check_cumulant_bounds(n: int, p: int, max_size: int, Ks=(2, 3), max_violations: int = 20) -> CheckTally:
    tally = CheckTally(f"cumulant_bound n={n} p={p} |a|<={max_size} K={list(Ks)}")
    t0 = time.perf_counter()
    for a in all_alphas(n, p, max_size, min_size=1):
        if not null_cumulant_filter(a):
            continue
        for K in Ks:
            tally.checked += 1
            kap = cumulant(a, K, d_max=max_size)
            if not cumulant_bound_holds(a, K, kap):
                tally.violations.append({"alpha": encode_support(a), "K": K, "kappa": str(kap)})
        if len(tally.violations) >= max_violations:
            break
    tally.seconds = time.perf_counter() - t0
    return tally


def check_filter_exactness(n: int, p: int, max_size: int, Ks=(2, 3, 4), max_violations: int = 20) -> CheckTally:
    """Shortcut-free cumulants vanish exactly wherever the structural filter fails."""
    tally = CheckTally(f"filter_exactness n={n} p={p} 1<=|a|<={max_size} K={list(Ks)}")
    t0 = time.perf_counter()
    for a in all_alphas(n, p, max_size, min_size=1):
        if null_cumulant_filter(a):
            continue
        for K in Ks:
            tally.checked += 1
            kap = cumulant(a, K, shortcut=False, d_max=max_size)
            if not kap.is_zero():
                tally.violations.append({"alpha": encode_support(a), "K": K, "kappa": str(kap)})
        if len(tally.violations) >= max_violations:
            break
    tally.seconds = time.perf_counter() - t0
    return tally


def grid_size(n: int, p: int, max_size: int) -> int:
    return count_alphas(n, p, max_size)
