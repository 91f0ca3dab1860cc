"""Gaussian mixture instances, mean priors and separation statistics."""
from __future__ import annotations

import enum
import itertools
import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import rng as _rng
from .partition import Partition

SCHEMA_VERSION = 1


class Prior(str, enum.Enum):
    FIXED_MEANS = "FixedMeans"
    BERNOULLI_HYPERCUBE = "BernoulliHypercube"
    GAUSSIAN_PRIOR = "GaussianPrior"


@dataclass(frozen=True, eq=False)
class MixtureInstance:
    n: int
    p: int
    K: int
    sigma: float
    means: np.ndarray
    labels: Partition
    data: np.ndarray
    prior: Prior
    delta_bar_sq: float | None
    seed: int

    def __post_init__(self):
        for name in ("means", "data"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.means.shape != (self.K, self.p):
            raise ValueError(f"means must be {self.K}x{self.p}, got {self.means.shape}")
        if self.data.shape != (self.n, self.p):
            raise ValueError(f"data must be {self.n}x{self.p}, got {self.data.shape}")
        if self.labels.n != self.n:
            raise ValueError("labels length does not match n")

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "n": self.n,
            "p": self.p,
            "K": self.K,
            "sigma": self.sigma,
            "means": self.means.tolist(),
            "labels": self.labels.labels.tolist(),
            "data": self.data.tolist(),
            "prior": self.prior.value,
            "delta_bar_sq": self.delta_bar_sq,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MixtureInstance":
        d = dict(d)
        version = d.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported instance schema_version {version}")
        expected = {"n", "p", "K", "sigma", "means", "labels", "data", "prior", "delta_bar_sq", "seed"}
        if set(d) != expected:
            raise ValueError(f"instance fields mismatch: {sorted(set(d) ^ expected)}")
        return cls(
            n=int(d["n"]),
            p=int(d["p"]),
            K=int(d["K"]),
            sigma=float(d["sigma"]),
            means=np.asarray(d["means"], dtype=np.float64).reshape(int(d["K"]), int(d["p"])),
            labels=Partition(np.asarray(d["labels"], dtype=np.int64), int(d["K"])),
            data=np.asarray(d["data"], dtype=np.float64).reshape(int(d["n"]), int(d["p"])),
            prior=Prior(d["prior"]),
            delta_bar_sq=None if d["delta_bar_sq"] is None else float(d["delta_bar_sq"]),
            seed=int(d["seed"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MixtureInstance":
        return cls.from_dict(json.loads(text))


def _noise(n: int, p: int, seed: int) -> np.ndarray:
    # one Philox stream per row: row i is identical whatever n is
    out = np.empty((n, p))
    for i in range(n):
        out[i] = _rng.stream(seed, _rng.NOISE, i).standard_normal(p)
    return out


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")


def sample_fixed_means(means, labels: Partition, sigma: float, seed: int) -> MixtureInstance:
    """Draw ``Y_i ~ N(means[labels[i]], sigma^2 I_p)`` independently."""
    means = np.asarray(means, dtype=np.float64)
    if means.ndim != 2:
        raise ValueError("means must be a K x p matrix")
    _check_positive(sigma=sigma)
    K, p = means.shape
    if labels.K != K:
        raise ValueError(f"labels use K={labels.K} but means has {K} rows")
    data = means[labels.labels] + sigma * _noise(labels.n, p, seed)
    return MixtureInstance(labels.n, p, K, float(sigma), means, labels, data,
                           Prior.FIXED_MEANS, None, int(seed))


def _uniform_labels(n: int, K: int, seed: int) -> Partition:
    return Partition(_rng.stream(seed, _rng.LABELS).integers(0, K, size=n), K)


def prior_epsilon(delta_bar_sq: float, sigma: float, p: int) -> float:
    """Half-side of the hypercube prior: ``eps^2 = delta_bar_sq * sigma^2 / p``."""
    return math.sqrt(delta_bar_sq * sigma**2 / p)


def _draw_signs(K: int, p: int, seed: int) -> np.ndarray:
    return np.where(_rng.stream(seed, _rng.MEANS).integers(0, 2, size=(K, p)) == 1, 1.0, -1.0)


def sample_bernoulli_prior(n: int, p: int, K: int, delta_bar_sq: float, sigma: float,
                           seed: int) -> MixtureInstance:
    """Uniform labels, means uniform on ``{+eps, -eps}^p``, then Gaussian noise."""
    _check_positive(n=n, p=p, K=K, sigma=sigma)
    if delta_bar_sq < 0:
        raise ValueError("delta_bar_sq must be nonnegative")
    labels = _uniform_labels(n, K, seed)
    means = prior_epsilon(delta_bar_sq, sigma, p) * _draw_signs(K, p, seed)
    data = means[labels.labels] + sigma * _noise(n, p, seed)
    return MixtureInstance(n, p, K, float(sigma), means, labels, data,
                           Prior.BERNOULLI_HYPERCUBE, float(delta_bar_sq), int(seed))


def sample_gaussian_prior(n: int, p: int, K: int, delta_bar_sq: float, sigma: float,
                          seed: int) -> MixtureInstance:
    """Like :func:`sample_bernoulli_prior` with means entries ``N(0, eps^2)``."""
    _check_positive(n=n, p=p, K=K, sigma=sigma)
    if delta_bar_sq < 0:
        raise ValueError("delta_bar_sq must be nonnegative")
    labels = _uniform_labels(n, K, seed)
    eps = prior_epsilon(delta_bar_sq, sigma, p)
    means = eps * _rng.stream(seed, _rng.MEANS).standard_normal((K, p))
    data = means[labels.labels] + sigma * _noise(n, p, seed)
    return MixtureInstance(n, p, K, float(sigma), means, labels, data,
                           Prior.GAUSSIAN_PRIOR, float(delta_bar_sq), int(seed))


def sample_separated_hypercube_means(K: int, p: int, delta_bar_sq: float, sigma: float,
                                     seed: int) -> np.ndarray:
    """Means uniform on ``{+e, -e}^{p}`` with ``e^2 = 2 delta_bar_sq sigma^2 / p``.

    At this scale the expected half squared distance between two means is
    ``2 delta_bar_sq``, and ``P(Delta^2 <= delta_bar_sq) <= K(K-1)/2 exp(-p/8)``.
    """
    _check_positive(K=K, p=p, sigma=sigma)
    return math.sqrt(2.0 * delta_bar_sq * sigma**2 / p) * _draw_signs(K, p, seed)


class PackingError(ValueError):
    pass


def _gray_greedy(K: int, b: int, dist: int) -> list[int] | None:
    """First ``K`` codewords of the greedy scan of ``{0,1}^b`` in Gray-code order."""
    idx = np.arange(1 << b, dtype=np.uint32)
    codes = idx ^ (idx >> 1)
    ok = np.ones(codes.size, dtype=bool)
    chosen = []
    pos = 0
    while len(chosen) < K:
        hits = np.flatnonzero(ok[pos:])
        if hits.size == 0:
            return None
        pos += int(hits[0])
        c = codes[pos]
        chosen.append(int(c))
        ok &= np.bitwise_count(codes ^ c) >= dist
    return chosen


def _bits(code: int, b: int) -> np.ndarray:
    return np.array([(code >> t) & 1 for t in range(b)], dtype=np.int8)


def _hamming_ok(words: np.ndarray, dist: int) -> bool:
    for a, c in itertools.combinations(range(len(words)), 2):
        if int(np.count_nonzero(words[a] != words[c])) < dist:
            return False
    return True


def hypercube_packing(K: int, p: int, delta_bar_sq: float, sigma: float = 1.0,
                      max_block: int = 20) -> np.ndarray:
    """``K`` vertices of ``delta_bar*sigma*sqrt(2/p) * {-1,+1}^p`` at Hamming distance ``>= p/4``.

    Every pair then satisfies
    ``delta_bar_sq <= ||mu_l - mu_r||^2 / (2 sigma^2) <= 4 delta_bar_sq``.

    The codewords come from a deterministic greedy scan of the hypercube in
    Gray-code order. Above ``max_block`` coordinates the scan runs on a block
    of ``b`` coordinates and the block code is repeated cyclically; the result
    is re-checked before it is returned.
    """
    if K < 1 or p < 1:
        raise ValueError("K and p must be positive")
    if p * math.log(2) / 4 < math.log(K):
        raise PackingError(f"need p*log(2)/4 >= log(K); p={p}, K={K}")
    need = math.ceil(p / 4)
    words = None
    if p <= max_block:
        codes = _gray_greedy(K, p, need)
        if codes is not None:
            words = np.array([_bits(c, p) for c in codes])
    else:
        divisors = [b for b in range(max_block, 3, -1) if p % b == 0]
        others = [b for b in range(max_block, 3, -1) if p % b != 0]
        for b in divisors + others:
            codes = _gray_greedy(K, b, math.ceil(b / 4))
            if codes is None:
                continue
            block = np.array([_bits(c, b) for c in codes])
            cand = block[:, np.arange(p) % b]
            if _hamming_ok(cand, need):
                words = cand
                break
    if words is None:
        raise PackingError(f"greedy scan exhausted before {K} points at p={p}; retry with larger p")
    scale = math.sqrt(delta_bar_sq) * sigma * math.sqrt(2.0 / p)
    return scale * (1.0 - 2.0 * words.astype(np.float64))


@dataclass(frozen=True)
class SeparationReport:
    delta_sq: float
    s_sq: float
    s_tilde_sq: float


def min_half_sq_distance(means, sigma: float) -> float:
    means = np.asarray(means, dtype=np.float64)
    diffs = means[:, None, :] - means[None, :, :]
    d2 = np.einsum("abj,abj->ab", diffs, diffs)
    iu = np.triu_indices(len(means), k=1)
    return float(d2[iu].min() / (2.0 * sigma**2))


def separation(means, sigma: float, labels: Partition) -> SeparationReport:
    means = np.asarray(means, dtype=np.float64)
    K, p = means.shape
    if K < 2:
        raise ValueError("separation needs at least two means")
    delta_sq = min_half_sq_distance(means, sigma)
    n = labels.n
    _, m, _ = balancedness(labels)
    s_sq = min(delta_sq, n * delta_sq**2 / (p * K))
    s_tilde_sq = min(delta_sq, delta_sq**2 * m / p)
    return SeparationReport(delta_sq, s_sq, s_tilde_sq)


def balancedness(labels: Partition) -> tuple[float, int, int]:
    """Return ``(m_plus / m, m, m_plus)`` over the nonempty groups."""
    sizes = labels.sizes()
    sizes = sizes[sizes > 0]
    if sizes.size == 0:
        raise ValueError("empty partition")
    m, m_plus = int(sizes.min()), int(sizes.max())
    return m_plus / m, m, m_plus
