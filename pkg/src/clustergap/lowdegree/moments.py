"""Exact moments and cumulants of the noiseless hypercube signal.

Labels ``k_i`` are uniform on ``K`` groups and ``X_ij = mu_{k_i, j}`` with
``mu`` Rademacher times ``eps``. A monomial ``X^gamma`` has conditional mean
``eps^|gamma|`` when, inside every group, each column sum of ``gamma`` is
even, and zero otherwise. Only rows with an odd entry constrain the groups,
so probabilities are computed on those rows alone (plus rows 0 and 1 when the
target ``x = 1{k_0 = k_1}`` is involved).
"""
from __future__ import annotations

import csv
import io
import itertools
from fractions import Fraction
from functools import lru_cache

from ..partition import falling_factorial, restricted_growth_strings
from .alpha import AlphaMatrix, graph_stats, null_cumulant_filter
from .scaled import ScaledRational

M_MAX = 10


class EnumerationError(ValueError):
    pass


def _odd_structure(gamma: AlphaMatrix, extra_rows: tuple[int, ...] = ()):
    """Relevant rows and, per column, the bitmask of rows holding an odd entry."""
    odd_rows = sorted({i for i, _, m in gamma.entries if m % 2})
    rows = sorted(set(odd_rows) | set(extra_rows))
    pos = {i: t for t, i in enumerate(rows)}
    masks: dict[int, int] = {}
    for i, j, m in gamma.entries:
        if m % 2:
            masks[j] = masks.get(j, 0) ^ (1 << pos[i])
    return len(rows), tuple(sorted(v for v in masks.values() if v)), pos


@lru_cache(maxsize=None)
def _even_weight(m: int, masks: tuple[int, ...], K: int, tie: tuple[int, int] | None) -> Fraction:
    """``P`` that ``m`` uniform labels make every mask even within every group.

    ``tie`` additionally requires two given positions to share a label.
    """
    if m > M_MAX:
        raise EnumerationError(f"{m} rows exceed the enumeration limit {M_MAX}")
    total = 0
    for rgs in restricted_growth_strings(m, K):
        if tie is not None and rgs[tie[0]] != rgs[tie[1]]:
            continue
        blocks: dict[int, int] = {}
        for t, b in enumerate(rgs):
            blocks[b] = blocks.get(b, 0) | (1 << t)
        if all(bin(mask & blk).count("1") % 2 == 0 for mask in masks for blk in blocks.values()):
            total += falling_factorial(K, len(blocks))
    return Fraction(total, K**m)


def parity_probability(gamma: AlphaMatrix, K: int) -> Fraction:
    """Probability that uniform labels satisfy the parity property for ``gamma``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    m, masks, _ = _odd_structure(gamma)
    return _even_weight(m, masks, K, None)


def parity_probability_bruteforce(gamma: AlphaMatrix, K: int) -> Fraction:
    """Same probability by scanning all ``K^m`` labelings of the support rows."""
    rows = gamma.rows()
    cols = gamma.cols()
    if len(rows) > 8:
        raise EnumerationError("too many rows for brute force")
    d = gamma.as_dict()
    good = 0
    for labels in itertools.product(range(K), repeat=len(rows)):
        lab = dict(zip(rows, labels))
        ok = True
        for j in cols:
            sums = [0] * K
            for i in rows:
                sums[lab[i]] += d.get((i, j), 0)
            if any(s % 2 for s in sums):
                ok = False
                break
        good += ok
    return Fraction(good, K ** len(rows))


def moment(gamma: AlphaMatrix, K: int) -> ScaledRational:
    """``E[X^gamma] = eps^|gamma| * P(parity)``."""
    return ScaledRational(gamma.size, parity_probability(gamma, K))


def cross_moment(gamma: AlphaMatrix, K: int) -> ScaledRational:
    """``E[x X^gamma]`` with ``x = 1{k_0 = k_1}``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    m, masks, pos = _odd_structure(gamma, extra_rows=(0, 1))
    return ScaledRational(gamma.size, _even_weight(m, masks, K, (pos[0], pos[1])))


def cumulant(alpha: AlphaMatrix, K: int, shortcut: bool = True, d_max: int = 8) -> ScaledRational:
    """Joint cumulant of ``x`` and ``alpha_ij`` copies of each ``X_ij``.

    Computed from the Moebius-type recursion over the sub-lattice below
    ``alpha``. With ``shortcut`` the structural vanishing test returns zero
    without recursing.
    """
    if alpha.size > d_max:
        raise EnumerationError(f"|alpha|={alpha.size} exceeds d_max={d_max}")
    return _cumulant(alpha.entries, K, shortcut)


@lru_cache(maxsize=None)
def _cumulant(entries, K: int, shortcut: bool) -> ScaledRational:
    alpha = AlphaMatrix(entries)
    if alpha.is_zero():
        return ScaledRational(0, Fraction(1, K))
    if shortcut and not null_cumulant_filter(alpha):
        return ScaledRational.zero(alpha.size)
    total = cross_moment(alpha, K)
    for beta in alpha.sublattice():
        if beta == alpha:
            continue
        kb = _cumulant(beta.entries, K, shortcut)
        if kb.is_zero():
            continue
        total = total - moment(alpha - beta, K) * kb * alpha.binom(beta)
    return ScaledRational(alpha.size, total.q)


def clear_caches():
    _even_weight.cache_clear()
    _cumulant.cache_clear()


CSV_COLUMNS = ["support_encoding", "size", "m", "r", "cc",
               "kappa_numerator", "kappa_denominator", "eps_degree"]


def encode_support(alpha: AlphaMatrix) -> str:
    """``i:j:mult`` triples joined by ``;``."""
    return ";".join(f"{i}:{j}:{m}" for i, j, m in alpha.entries)


def decode_support(text: str) -> AlphaMatrix:
    if not text:
        return AlphaMatrix(())
    return AlphaMatrix(tuple(tuple(int(x) for x in part.split(":")) for part in text.split(";")))


def cumulant_table_csv(alphas, K: int) -> str:
    """CSV rows of exact cumulants for the given matrices."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for a in alphas:
        kap = cumulant(a, K)
        s = graph_stats(a)
        w.writerow([encode_support(a), a.size, s.m, s.r, s.cc,
                    kap.q.numerator, kap.q.denominator, kap.d])
    return buf.getvalue()
