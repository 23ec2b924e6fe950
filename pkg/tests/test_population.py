"""User-class populations: configurations, exact enumeration, Monte Carlo."""

import math
from itertools import product

import numpy as np
import pytest
from pytest import approx

from coopd2d import (
    RequestConfiguration,
    build_popularity,
    configuration_probability,
    coop_count,
    expected_cellular_and_noncoop,
    expected_coop_users_exact,
    expected_coop_users_mc,
)
from coopd2d.errors import ConsistencyError, EnumerationBudgetError

import oracles


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def test_request_configuration_validation():
    RequestConfiguration(np.array([[1, 1], [2, 0]]))
    with pytest.raises(ValueError):
        RequestConfiguration(np.array([1, 1]))  # not a matrix
    with pytest.raises(ValueError):
        RequestConfiguration(np.array([[1, 1], [2, 1]]))  # unequal cluster sizes
    with pytest.raises(ValueError):
        RequestConfiguration(np.array([[1, -1], [0, 0]]))
    with pytest.raises(ValueError):
        RequestConfiguration(np.array([[0.5, 0.5]]))  # non-integer counts


def test_request_configuration_properties():
    config = RequestConfiguration(np.array([[1, 1], [2, 0]]))
    assert config.n_clusters == 2
    assert config.users_per_cluster == 2
    with pytest.raises(ValueError):
        config.counts[0, 0] = 5  # read-only


def test_configuration_probability_single_user(two_group):
    config = RequestConfiguration(np.array([[1, 0]]))
    assert configuration_probability(config, two_group) == approx(0.7, rel=1e-15)


def test_configuration_probability_binomial(two_group):
    config = RequestConfiguration(np.array([[1, 1]]))
    assert configuration_probability(config, two_group) == approx(0.42, rel=1e-14)


def test_configuration_probability_width_check(two_group):
    with pytest.raises(ValueError):
        configuration_probability(RequestConfiguration(np.array([[1, 1, 1]])), two_group)


def test_configuration_probabilities_sum_to_one():
    model = oracles.make_synthetic_model([0.5, 0.3, 0.2])
    total = math.fsum(
        configuration_probability(
            RequestConfiguration(np.array([row_a, row_b])), model
        )
        for row_a in _compositions(3, 3)
        for row_b in _compositions(3, 3)
    )
    assert total == approx(1.0, abs=1e-12)


def test_coop_count_examples():
    # both single-user clusters request the cached group: both cooperate
    both = RequestConfiguration(np.array([[1, 0], [1, 0]]))
    assert coop_count(both, 1) == 2
    # the clusters hit different groups: nobody cooperates
    split = RequestConfiguration(np.array([[1, 0], [0, 1]]))
    assert coop_count(split, 1) == 0
    # group 0 hit everywhere (1 + 2 requesters), group 1 only in cluster 0
    mixed = RequestConfiguration(np.array([[1, 1], [2, 0]]))
    assert coop_count(mixed, 2) == 3


def test_coop_count_ignores_uncached_groups():
    config = RequestConfiguration(np.array([[1, 0, 2], [1, 1, 1]]))
    assert coop_count(config, 2) == 2  # only group 0 is hit in both clusters


def test_exact_two_cluster_single_user(two_group):
    summary = expected_coop_users_exact(two_group, 1, 2)
    assert summary.method == "exact"
    assert summary.std_error == 0.0
    assert summary.coop_mean == approx(0.98, rel=1e-12)
    assert summary.cellular_mean == approx(0.6, rel=1e-12)
    assert summary.noncoop_mean == approx(0.42, rel=1e-12)
    assert summary.coop_mean + summary.cellular_mean + summary.noncoop_mean == approx(
        2.0, abs=1e-9
    )


def test_exact_degenerate_single_cluster():
    model = oracles.make_synthetic_model([1.0])
    summary = expected_coop_users_exact(model, 1, 1)
    assert summary.coop_mean == 1.0
    assert summary.cellular_mean == 0.0
    assert summary.noncoop_mean == 0.0


def test_exact_matches_brute_force_small():
    model = build_popularity(60, 20, 1.0)
    for k, b in ((1, 2), (2, 2), (3, 2), (2, 3)):
        lib = expected_coop_users_exact(model, k, b).coop_mean
        assert lib == oracles.brute_force_coop_mean(model, k, b)  # bit-for-bit


def test_exact_matches_linearity_closed_form():
    model = build_popularity(40, 20, 1.0)
    summary = expected_coop_users_exact(model, 2, 2)
    assert summary.coop_mean == approx(3.4647956692347037, rel=1e-15)
    assert summary.coop_mean == approx(
        oracles.closed_form_coop_mean(model, 2, 2), rel=1e-12
    )


def test_exact_budget_refusal(ref_model):
    with pytest.raises(EnumerationBudgetError):
        expected_coop_users_exact(ref_model, 15, 9)
    with pytest.raises(EnumerationBudgetError):
        expected_coop_users_exact(build_popularity(60, 20, 1.0), 3, 2, budget=10)


def test_exact_input_checks(two_group):
    with pytest.raises(ValueError):
        expected_coop_users_exact(two_group, 0, 2)
    with pytest.raises(ValueError):
        expected_coop_users_exact(two_group, 3, 2)
    with pytest.raises(ValueError):
        expected_coop_users_exact(two_group, 1, 0)


def test_mc_agrees_with_exact_within_three_sigma(two_group):
    exact = expected_coop_users_exact(two_group, 2, 3).coop_mean
    mc = expected_coop_users_mc(two_group, 2, 3, trials=100_000, seed=7)
    assert mc.method == "monte-carlo"
    assert abs(mc.coop_mean - exact) <= 3.0 * mc.std_error
    total = mc.coop_mean + mc.cellular_mean + mc.noncoop_mean
    assert total == approx(6.0, abs=1e-9)  # role counts partition every draw


def test_mc_reproducible_and_seed_sensitive(two_group):
    a = expected_coop_users_mc(two_group, 2, 2, trials=5_000, seed=11)
    b = expected_coop_users_mc(two_group, 2, 2, trials=5_000, seed=11)
    c = expected_coop_users_mc(two_group, 2, 2, trials=5_000, seed=12)
    assert a == b
    assert a.coop_mean != c.coop_mean


def test_mc_single_trial_has_undefined_error(two_group):
    summary = expected_coop_users_mc(two_group, 2, 2, trials=1, seed=3)
    assert summary.std_error == math.inf


def test_mc_input_checks(two_group):
    with pytest.raises(ValueError):
        expected_coop_users_mc(two_group, 2, 2, trials=0, seed=3)
    with pytest.raises(ValueError):
        expected_coop_users_mc(two_group, 5, 2, trials=10, seed=3)


def test_coop_mean_nondecreasing_in_skew():
    # larger skew concentrates requests on cached groups; verified CI-aware
    means = []
    errs = []
    for beta in (0.0, 0.3, 0.6, 0.9, 1.2):
        model = build_popularity(300, 20, beta)
        summary = expected_coop_users_mc(model, 15, 9, trials=20_000, seed=0xBE7A)
        means.append(summary.coop_mean)
        errs.append(summary.std_error)
    for i in range(len(means) - 1):
        assert means[i + 1] - means[i] > -3.0 * math.hypot(errs[i], errs[i + 1]), (
            means,
            errs,
        )


def test_cellular_and_noncoop_split(two_group):
    cellular, noncoop = expected_cellular_and_noncoop(two_group, 2, 1, 0.98)
    assert cellular == approx(0.6, rel=1e-12)
    assert noncoop == approx(0.42, rel=1e-12)


def test_cellular_vanishes_when_catalog_fully_cached(ref_model):
    cellular, _ = expected_cellular_and_noncoop(ref_model, 135, 15, 80.0)
    assert cellular == approx(0.0, abs=1e-9)


def test_cellular_split_consistency_guard(two_group):
    # a coop mean that exceeds the non-cellular mass is inconsistent
    with pytest.raises(ConsistencyError):
        expected_cellular_and_noncoop(two_group, 2, 1, 1.9)
    with pytest.raises(ValueError):
        expected_cellular_and_noncoop(two_group, 2, 1, 2.5)
    # tiny negative roundoff clamps to zero instead
    model = oracles.make_synthetic_model([1.0])
    _, noncoop = expected_cellular_and_noncoop(model, 1, 1, 1.0)
    assert noncoop == 0.0
