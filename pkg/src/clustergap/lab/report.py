"""One JSON document comparing the low-degree bound with its oracles."""
from __future__ import annotations

from fractions import Fraction

from ..lowdegree.bounds import bound_report, corr_bound_sum
from ..lowdegree.moments import EnumerationError
from ..lowdegree.oracles import empirical_mmse


def lowdegree_report(n: int, p: int, K: int, delta_bar_sq: float, D: int, samples: int,
                     seed: int = 0, enum_budget: int = 200_000) -> dict:
    """Bound, cumulant sum, regression estimate and trivial MSE side by side.

    Fields that cannot be computed at the requested size are replaced by a
    ``*_omitted`` entry giving the reason.
    """
    rep = bound_report(n, p, K, delta_bar_sq, D)
    doc = {
        "params": {"n": n, "p": p, "K": K, "delta_bar_sq": delta_bar_sq, "D": D,
                   "samples": samples, "seed": seed},
        "trivial_mse": 1.0 / K - 1.0 / K**2,
        "bound": rep.to_dict(),
    }
    eps_sq = Fraction(delta_bar_sq).limit_denominator(10**12) / p
    try:
        s = corr_bound_sum(n, p, D, K, eps_sq, budget=enum_budget)
        doc["corr_bound_sum"] = float(s)
        doc["mmse_lower_from_cumulants"] = 1.0 / K - float(s)
    except EnumerationError as exc:
        doc["corr_bound_sum_omitted"] = str(exc)
    try:
        est, se = empirical_mmse(n, p, K, delta_bar_sq, D, samples, seed)
        doc["empirical_mmse"] = {"estimate": est, "stderr": se}
        doc["empirical_ge_bound"] = bool(est >= rep.mmse_lower - 3 * se)
    except ValueError as exc:
        doc["empirical_mmse_omitted"] = str(exc)
    return doc
