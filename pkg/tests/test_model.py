from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clustergap import rng
from clustergap.model import (MixtureInstance, PackingError, Prior, balancedness,
                              hypercube_packing, prior_epsilon, sample_bernoulli_prior,
                              sample_fixed_means, sample_gaussian_prior,
                              sample_separated_hypercube_means, separation)
from clustergap.partition import Partition, falling_factorial, restricted_growth_strings


# --- partition helpers -------------------------------------------------------

def test_restricted_growth_strings_count_bell_numbers():
    bell = [1, 1, 2, 5, 15, 52, 203, 877]
    for n, b in enumerate(bell):
        assert sum(1 for _ in restricted_growth_strings(n)) == b


def test_restricted_growth_strings_bounded_blocks_match_stirling_sums():
    # partitions of 5 into at most 2 blocks: S(5,1) + S(5,2) = 1 + 15
    assert sum(1 for _ in restricted_growth_strings(5, 2)) == 16


def test_falling_factorial():
    assert falling_factorial(5, 0) == 1
    assert falling_factorial(5, 3) == 60
    assert falling_factorial(2, 3) == 0


def test_partition_canonical_and_same_as():
    a = Partition.from_labels([2, 2, 0, 1], K=3)
    assert a.canonical().labels.tolist() == [0, 0, 1, 2]
    assert a.same_as(Partition.from_labels([1, 1, 2, 0], K=3))
    assert not a.same_as(Partition.from_labels([0, 1, 1, 2], K=3))
    with pytest.raises(ValueError):
        Partition.from_labels([0, 3], K=3)


def test_mix_seed_distinct_and_stable():
    seeds = {rng.mix_seed(7, c, t) for c in range(10) for t in range(10)}
    assert len(seeds) == 100
    assert rng.mix_seed(7, 1, 2) == rng.mix_seed(7, 1, 2)
    # splitmix64 reference value for input 0
    assert rng.splitmix64(0) == 0xE220A8397B1DCDAF


# --- samplers ------------------------------------------------------------------

def test_fixed_means_small_sigma_recovers_means():
    means = np.array([[0.0, 1.0], [5.0, -2.0]])
    labels = Partition.from_labels([0, 1, 1, 0, 1], K=2)
    inst = sample_fixed_means(means, labels, 1e-12, seed=3)
    assert np.allclose(inst.data, means[labels.labels], atol=1e-9)


def test_fixed_means_identical_means_sample_mean():
    n, sigma = 400, 2.0
    means = np.tile([1.0, -1.0, 0.5], (3, 1))
    labels = Partition(np.arange(n) % 3, 3)
    inst = sample_fixed_means(means, labels, sigma, seed=11)
    assert np.all(np.abs(inst.data.mean(axis=0) - means[0]) <= 4 * sigma / math.sqrt(n))


def test_fixed_means_within_cluster_covariance_is_identity():
    n = 1000
    means = np.array([[0.0, 0.0], [10.0, 0.0]])
    labels = Partition(np.arange(n) % 2, 2)
    inst = sample_fixed_means(means, labels, 1.0, seed=5)
    resid = inst.data - means[labels.labels]
    cov = np.cov(resid.T)
    assert np.all(np.abs(cov - np.eye(2)) < 0.2)


def test_fixed_means_errors():
    labels = Partition.from_labels([0, 1], K=2)
    with pytest.raises(ValueError):
        sample_fixed_means(np.zeros((2, 3)), labels, 0.0, seed=0)
    with pytest.raises(ValueError):
        sample_fixed_means(np.zeros((3, 3)), labels, 1.0, seed=0)


def test_bernoulli_prior_support_and_zero_signal():
    inst = sample_bernoulli_prior(30, 16, 3, 2.0, 1.5, seed=1)
    eps = prior_epsilon(2.0, 1.5, 16)
    assert math.isclose(eps**2, 2.0 * 1.5**2 / 16)
    assert np.all(np.abs(inst.means) == eps)
    assert inst.prior is Prior.BERNOULLI_HYPERCUBE
    zero = sample_bernoulli_prior(10, 4, 2, 0.0, 1.0, seed=1)
    assert np.all(zero.means == 0)


def test_bernoulli_prior_label_frequencies():
    # binomial(4000, 1/4): [800, 1200] is more than 10 standard deviations wide
    inst = sample_bernoulli_prior(4000, 2, 4, 1.0, 1.0, seed=2)
    freq = inst.labels.sizes() / 4000
    assert np.all((freq >= 0.2) & (freq <= 0.3))


def test_bernoulli_prior_rejects_bad_params():
    with pytest.raises(ValueError):
        sample_bernoulli_prior(0, 4, 2, 1.0, 1.0, seed=0)
    with pytest.raises(ValueError):
        sample_bernoulli_prior(4, 4, 2, -1.0, 1.0, seed=0)


def test_gaussian_prior_variance():
    K, p, dbs, sigma = 20, 200, 3.0, 1.0
    inst = sample_gaussian_prior(5, p, K, dbs, sigma, seed=4)
    eps_sq = dbs * sigma**2 / p
    v = inst.means.var()
    # chi-square: var of the sample variance is about 2 eps^4 / (Kp)
    assert abs(v - eps_sq) <= 5 * eps_sq * math.sqrt(2 / (K * p))
    assert np.all(sample_gaussian_prior(4, 3, 2, 0.0, 1.0, seed=0).means == 0)


def test_gaussian_prior_pair_distance_concentrates():
    p, dbs = 20000, 2.0
    inst = sample_gaussian_prior(3, p, 2, dbs, 1.0, seed=9)
    half = float(((inst.means[0] - inst.means[1]) ** 2).sum()) / 2
    assert abs(half - dbs) < 0.1 * dbs


def test_determinism_bit_identical():
    a = sample_bernoulli_prior(15, 6, 3, 1.0, 1.0, seed=123)
    b = sample_bernoulli_prior(15, 6, 3, 1.0, 1.0, seed=123)
    assert np.array_equal(a.data, b.data) and np.array_equal(a.means, b.means)
    c = sample_bernoulli_prior(15, 6, 3, 1.0, 1.0, seed=124)
    assert not np.array_equal(a.data, c.data)


def test_noise_rows_do_not_depend_on_n():
    a = sample_bernoulli_prior(5, 6, 2, 0.0, 1.0, seed=8)
    b = sample_bernoulli_prior(9, 6, 2, 0.0, 1.0, seed=8)
    assert np.array_equal(a.data, b.data[:5])


def test_instance_json_round_trip():
    inst = sample_bernoulli_prior(6, 3, 2, 1.0, 1.0, seed=6)
    back = MixtureInstance.from_json(inst.to_json())
    assert np.array_equal(back.data, inst.data)
    assert back.labels.labels.tolist() == inst.labels.labels.tolist()
    assert back.to_json() == inst.to_json()
    bad = inst.to_dict()
    bad["extra"] = 1
    with pytest.raises(ValueError):
        MixtureInstance.from_dict(bad)


# --- packing -------------------------------------------------------------------

def _half_sq(M):
    return {(a, b): float(((M[a] - M[b]) ** 2).sum()) / 2 for a, b in itertools.combinations(range(len(M)), 2)}


def test_packing_single_point():
    M = hypercube_packing(1, 8, 1.0)
    assert M.shape == (1, 8)


def test_packing_two_points_p4_antipodal():
    M = hypercube_packing(2, 4, 0.7)
    assert np.allclose(np.abs(M), math.sqrt(0.7) * math.sqrt(2 / 4))
    # antipodal vertices reach the upper end, 4 * delta_bar_sq
    plus = np.full(4, math.sqrt(0.7 * 2 / 4))
    assert math.isclose(float(((plus - (-plus)) ** 2).sum()) / 2, 4 * 0.7)


@pytest.mark.parametrize("K,p", [(4, 16), (5, 24), (3, 192), (8, 40), (16, 64)])
def test_packing_separation_bounds(K, p):
    dbs = 1.3
    M = hypercube_packing(K, p, dbs, sigma=2.0)
    for v in _half_sq(M / 2.0).values():
        assert dbs * (1 - 1e-12) <= v <= 4 * dbs * (1 + 1e-12)
    sep = separation(M, 2.0, Partition(np.arange(K), K))
    assert sep.delta_sq >= dbs * (1 - 1e-12)


def test_packing_precondition():
    with pytest.raises(PackingError):
        hypercube_packing(5, 4, 1.0)


def test_packing_is_deterministic():
    assert np.array_equal(hypercube_packing(6, 30, 1.0), hypercube_packing(6, 30, 1.0))


# --- separation and balancedness ----------------------------------------------

def test_separation_two_points():
    means = np.array([[0.0, 0.0], [3.0, 4.0]])
    rep = separation(means, 1.0, Partition.from_labels([0, 1], 2))
    assert math.isclose(rep.delta_sq, 25 / 2)


def test_separation_s_sq_plugin():
    # Delta^2 = 3 with n=100, p=400, K=2
    d = math.sqrt(6.0)
    means = np.zeros((2, 400))
    means[1, 0] = d
    labels = Partition(np.arange(100) % 2, 2)
    rep = separation(means, 1.0, labels)
    assert math.isclose(rep.delta_sq, 3.0)
    assert math.isclose(rep.s_sq, 1.125)
    assert math.isclose(rep.s_tilde_sq, min(3.0, 9.0 * 50 / 400))
    assert rep.s_sq <= rep.delta_sq


def test_separation_rejects_single_mean():
    with pytest.raises(ValueError):
        separation(np.zeros((1, 3)), 1.0, Partition.from_labels([0, 0], 1))


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 6), st.integers(1, 5), st.floats(0.1, 5.0), st.integers(0, 2**32))
def test_separation_matches_pairwise_scan(K, p, sigma, seed):
    means = np.random.default_rng(seed).standard_normal((K, p))
    rep = separation(means, sigma, Partition(np.arange(K), K))
    brute = math.inf
    for a in range(K):
        for b in range(K):
            if a != b:
                brute = min(brute, sum((means[a, j] - means[b, j]) ** 2 for j in range(p)) / (2 * sigma**2))
    assert math.isclose(rep.delta_sq, brute, rel_tol=1e-12, abs_tol=1e-15)


def test_balancedness_examples():
    assert balancedness(Partition.from_labels([0, 1, 0, 1], 2)) == (1.0, 2, 2)
    assert balancedness(Partition.from_labels([0, 0, 1, 1, 1], 2))[0] == 1.5
    labels = Partition.from_labels([0] + [1] + [2] * 8, 3)
    assert balancedness(labels) == (8.0, 1, 8)
    # empty groups are ignored
    assert balancedness(Partition.from_labels([0, 0, 2, 2], 4)) == (1.0, 2, 2)
    with pytest.raises(ValueError):
        balancedness(Partition(np.zeros(0, dtype=int), 2))


# --- separation probability for random hypercube means ------------------------

def test_random_hypercube_means_separation_probability():
    """Fraction of draws with Delta^2 < delta_bar_sq stays under the union bound.

    Uses the doubled-scale sampler; see the decisions ledger for why the
    plain prior scale cannot satisfy this bound.
    """
    K, dbs, trials = 3, 1.0, 2000
    n = 4
    p = math.ceil(8 * math.log(K * (K - 1) / 2 * n**2))
    bound = K * (K - 1) / 2 * math.exp(-p / 8)
    hits = 0
    for t in range(trials):
        M = sample_separated_hypercube_means(K, p, dbs, 1.0, seed=t)
        hits += separation(M, 1.0, Partition(np.arange(K), K)).delta_sq < dbs
    frac = hits / trials
    se = math.sqrt(bound * (1 - bound) / trials)
    assert frac <= bound + 3 * se
