"""Combinatorial bound checks, the cumulant sum and the closed-form smallness parameters."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..partition import restricted_growth_strings
from .alpha import (AlphaMatrix, all_alphas, count_alphas, graph_stats,
                    null_cumulant_filter, topology_conditions)
from .moments import EnumerationError, _odd_structure, cross_moment, cumulant, moment

DEFAULT_BUDGET = 2_000_000


def _le_power(lhs: Fraction, base: int, k: int, twice_exp: int) -> bool:
    """Exact test of ``lhs <= base^base * k^(-twice_exp / 2)`` for ``lhs >= 0``.

    Half-integer exponents are handled by squaring both sides.
    """
    if lhs < 0:
        raise ValueError("lhs must be nonnegative")
    rhs_sq = Fraction(base ** (2 * base)) * Fraction(k) ** (-twice_exp)
    return lhs * lhs <= rhs_sq


def moment_bound_holds(gamma: AlphaMatrix, K: int) -> bool:
    """Check both moment bounds for ``gamma``.

    ``E[X^g] <= eps^|g| min(1, |g|^|g| K^-(l - |g|/2 - CC))`` and the same for
    ``E[x X^g]`` with ``1/K`` in place of 1. Both sides carry ``eps^|g|``, so
    only the rational factors are compared.
    """
    s = graph_stats(gamma)
    g = gamma.size
    twice = 2 * s.l - g - 2 * s.cc
    plain = moment(gamma, K).q
    cross = cross_moment(gamma, K).q
    ok_plain = 0 <= plain <= 1 and _le_power(plain, g, K, twice)
    ok_cross = 0 <= cross <= Fraction(1, K) and _le_power(cross, g, K, twice)
    return ok_plain and ok_cross


def cumulant_bound_holds(alpha: AlphaMatrix, K: int, kappa=None) -> bool:
    """``|kappa| <= eps^|a| (1+|a|)^|a| min(1/K, |a|^|a| K^-(l - |a|/2 - 1))``."""
    a = alpha.size
    if kappa is None:
        kappa = cumulant(alpha, K, d_max=max(a, 6))
    q = abs(kappa.q)
    if q == 0:
        return True
    s = graph_stats(alpha)
    lead = Fraction((1 + a) ** a)
    if q > lead / K:
        return False
    # q / lead <= a^a K^-(l - a/2 - 1)
    return _le_power(q / lead, a, K, 2 * s.l - a - 2)


@lru_cache(maxsize=None)
def _max_even_blocks(m: int, masks: tuple[int, ...]) -> int:
    """Largest block count among partitions of ``m`` rows even for every mask; -1 if none."""
    best = -1
    for rgs in restricted_growth_strings(m, m):
        blocks: dict[int, int] = {}
        for t, b in enumerate(rgs):
            blocks[b] = blocks.get(b, 0) | (1 << t)
        if len(blocks) <= best:
            continue
        if all(bin(mask & blk).count("1") % 2 == 0 for mask in masks for blk in blocks.values()):
            best = len(blocks)
    return best


def max_even_groups(gamma: AlphaMatrix, m_max: int = 8) -> int:
    """Most groups in a partition of the support rows under which ``gamma`` is even."""
    rows = gamma.rows()
    if len(rows) > m_max:
        raise EnumerationError(f"{len(rows)} support rows exceed {m_max}")
    m, masks, _ = _odd_structure(gamma, extra_rows=tuple(rows))
    return _max_even_blocks(m, masks)


def numbergroups_check(gamma: AlphaMatrix, m_max: int = 8) -> bool:
    """Every even partition ``G`` of the support rows has ``|G| <= |g|/2 - r + CC``.

    Only the largest even partition matters, so the check compares that one.
    Vacuously true when no even partition exists.
    """
    best = max_even_groups(gamma, m_max)
    if best < 0:
        return True
    s = graph_stats(gamma)
    return 2 * best <= gamma.size - 2 * s.r + 2 * s.cc


def corr_bound_sum(n: int, p: int, D: int, K: int, eps_sq, budget: int = DEFAULT_BUDGET) -> Fraction:
    """``sum_{|a| <= D} kappa_a^2 / a!`` with ``eps^2`` substituted exactly.

    Labelled matrices are enumerated literally; those that fail the
    structural tests are skipped since their cumulant is zero.
    """
    eps_sq = Fraction(eps_sq)
    total_count = count_alphas(n, p, D)
    if total_count > budget:
        raise EnumerationError(f"{total_count} matrices exceed the budget {budget}")
    total = Fraction(1, K * K)
    for a in all_alphas(n, p, D, min_size=1):
        if not topology_conditions(a) or not null_cumulant_filter(a):
            continue
        kap = cumulant(a, K, d_max=max(D, 1))
        if kap.is_zero():
            continue
        total += kap.squared_at(eps_sq) / a.factorial()
    return total


def zeta_n(n: int, p: int, K: int, delta_bar_sq, D: int):
    """Smallness parameter for ``p >= n``. Exact when ``delta_bar_sq`` is a Fraction."""
    return delta_bar_sq**2 * D**8 * (1 + D) ** 4 / p * max(Fraction(n, K * K), 1)


def zeta_bar_n(n: int, p: int, K: int, delta_bar_sq, D: int):
    """Smallness parameter for ``p <= n``."""
    return delta_bar_sq**2 * D**8 * (1 + D) ** 4 * Fraction(n, p * p) * max(Fraction(n, K * K), 1)


def corr_sq_upper_bound(zeta: float, K: int) -> float:
    return (1.0 + zeta / (1.0 - math.sqrt(zeta)) ** 3) / K**2


def certified_corr_sq_upper(zeta: Fraction, K: int, digits: int = 30) -> Fraction:
    """A rational lower bound on ``(1 + z / (1 - sqrt z)^3) / K^2``.

    ``sqrt z`` is replaced by a rational lower bound, which can only shrink
    the expression; a value below the result is therefore below the true bound.
    """
    zeta = Fraction(zeta)
    if not 0 <= zeta < 1:
        raise ValueError("needs 0 <= zeta < 1")
    scale = 10**digits
    s_lo = Fraction(math.isqrt(zeta.numerator * scale * scale // zeta.denominator), scale)
    return (1 + zeta / (1 - s_lo) ** 3) / (K * K)


PRIORS = ("bernoulli", "gaussian")


@dataclass(frozen=True)
class BoundReport:
    zeta: float
    zeta_bar: float
    mmse_lower: float
    corr_sq_upper: float
    applicable: bool
    regime: str
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "zeta": self.zeta,
            "zeta_bar": self.zeta_bar,
            "mmse_lower": self.mmse_lower,
            "corr_sq_upper": self.corr_sq_upper,
            "applicable": self.applicable,
            "regime": self.regime,
            "warnings": list(self.warnings),
        }


def bound_report(n: int, p: int, K: int, delta_bar_sq: float, D: int,
                 prior: str = "bernoulli") -> BoundReport:
    """Degree-``D`` MMSE lower bound for estimating one partnership entry.

    Uses ``zeta`` when ``p >= n`` and ``zeta_bar`` otherwise. When the chosen
    parameter is not below 1 the bound says nothing; the report then carries
    the trivial values (``mmse_lower = 0``, ``corr_sq_upper = 1/K``). Below 1
    the correlation bound can still exceed ``1/K``; ``mmse_lower`` is then
    clipped at 0 and a warning is attached.
    """
    if min(n, p, K) < 1 or D < 0 or delta_bar_sq < 0:
        raise ValueError("n, p, K must be positive and D, delta_bar_sq nonnegative")
    if prior not in PRIORS:
        raise ValueError(f"unknown prior {prior!r}")
    z = float(zeta_n(n, p, K, delta_bar_sq, D))
    zb = float(zeta_bar_n(n, p, K, delta_bar_sq, D))
    regime = "p>=n" if p >= n else "p<n"
    used = z if p >= n else zb
    notes = []
    if prior == "gaussian":
        notes.append("gaussian prior: power of D not established, bernoulli formula reused")
    applicable = used < 1
    if applicable:
        upper = corr_sq_upper_bound(used, K)
        lower = 1.0 / K - upper
        if lower <= 0:
            lower = 0.0
            notes.append(f"zeta={used:.6g}: correlation bound above 1/K, lower bound clipped to 0")
    else:
        upper, lower = 1.0 / K, 0.0
        notes.append(f"zeta={used:.6g} >= 1: bound vacuous")
    return BoundReport(z, zb, lower, upper, applicable, regime, tuple(notes))
