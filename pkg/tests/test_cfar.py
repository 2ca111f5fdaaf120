import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparse_cfar import (
    AdmmConfig,
    CfarConfig,
    DegenerateSupportError,
    FinalEstimatePolicy,
    InputError,
    SensingProblem,
    SynthSpec,
    Termination,
    cfar_threshold,
    check_invariants,
    estimate_noise_variance,
    iar_lasso_admm_cfar,
    matched_projection,
    residual_noise,
    restrict_to_zero_support,
    stopping_decision,
    synthesize,
    threshold_estimate,
    update_support,
)
from sparse_cfar.cfar import Decision

from conftest import orthogonal, orthonormal_rows

# supports are 0-based index arrays


def test_matched_projection_examples():
    np.testing.assert_array_equal(matched_projection(np.eye(2), [1.0, 2.0]), [1.0, 2.0])
    np.testing.assert_array_equal(matched_projection(np.ones((2, 3)), [0.0, 0.0]), np.zeros(3))
    with pytest.raises(InputError):
        matched_projection(np.eye(2), [1.0, 2.0, 3.0])


@pytest.mark.parametrize("shape", [(8, 8), (4, 8)])
def test_matched_projection_noise_variance(shape):
    """Component i of A^T n has variance sigma^2 ||a_i||^2 (sigma^2 for unit columns)."""
    rng = np.random.default_rng(2024)
    m, n = shape
    A = orthogonal(rng, n) if m == n else orthonormal_rows(rng, m, n)
    sigma = 0.3
    draws = np.stack([matched_projection(A, sigma * rng.standard_normal(m)) for _ in range(10_000)])
    expected = sigma**2 * np.sum(A**2, axis=0)
    if m == n:
        np.testing.assert_allclose(expected, sigma**2)
    np.testing.assert_allclose(draws.var(axis=0), expected, rtol=0.05)


def test_restrict_examples():
    x = np.array([5.0, 6.0, 7.0])
    np.testing.assert_array_equal(restrict_to_zero_support(x, [0, 1, 2]), x)
    np.testing.assert_array_equal(restrict_to_zero_support(x, []), np.zeros(3))
    np.testing.assert_array_equal(restrict_to_zero_support(x, [1]), [0.0, 6.0, 0.0])
    with pytest.raises(InputError):
        restrict_to_zero_support(x, [3])


def test_residual_noise_examples(rng):
    A = rng.standard_normal((3, 5))
    np.testing.assert_array_equal(residual_noise(A, np.zeros(5)), np.zeros(3))
    v = rng.standard_normal(4)
    np.testing.assert_array_equal(residual_noise(np.eye(4), v), v)


def test_residual_noise_recovers_noise_when_rows_orthonormal(rng):
    A = orthonormal_rows(rng, 16, 40)
    assert np.max(np.abs(A @ A.T - np.eye(16))) <= 1e-12
    noise = rng.standard_normal(16)
    x_r = restrict_to_zero_support(matched_projection(A, noise), np.arange(40))
    np.testing.assert_allclose(residual_noise(A, x_r), noise, atol=1e-12)


def test_noise_variance_examples():
    assert estimate_noise_variance(np.zeros(4), 3) == 0.0
    assert estimate_noise_variance(np.array([2.0, 0.0]), 2) == 1.0
    with pytest.raises(DegenerateSupportError):
        estimate_noise_variance(np.ones(2), 0)


def test_noise_variance_expectation_small():
    """E[sigma2_hat] = M sigma^2 / (2N) when A A^T = I and every column is in the zero support."""
    rng = np.random.default_rng(99)
    m, n, sigma = 16, 32, 0.2
    A = orthonormal_rows(rng, m, n)
    est = []
    for _ in range(4000):
        y_t = residual_noise(A, matched_projection(A, sigma * rng.standard_normal(m)))
        est.append(estimate_noise_variance(y_t, n))
    est = np.asarray(est)
    se = est.std(ddof=1) / math.sqrt(est.size)
    assert abs(est.mean() - m * sigma**2 / (2 * n)) <= 3 * se


def test_cfar_threshold_examples():
    assert cfar_threshold(1.0, math.exp(-0.5)) == pytest.approx(1.0)
    assert cfar_threshold(0.0, 0.01) == 0.0
    assert cfar_threshold(0.5, 0.001) == pytest.approx(2.62827, abs=1e-5)
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(InputError):
            cfar_threshold(1.0, bad)


@given(st.floats(1e-8, 1e4), st.floats(1e-8, 1e4), st.floats(1e-6, 0.999))
def test_cfar_threshold_increasing_in_sigma(s1, s2, p):
    if s1 < s2:
        assert cfar_threshold(s1, p) < cfar_threshold(s2, p)


@given(st.floats(1e-6, 1e4), st.floats(1e-6, 0.999), st.floats(1e-6, 0.999))
def test_cfar_threshold_decreasing_in_pfa(s, p1, p2):
    if p1 < p2:
        assert cfar_threshold(s, p1) > cfar_threshold(s, p2)


@given(st.floats(1e-6, 1e3), st.floats(1e-4, 0.99))
def test_cfar_threshold_inverts_rayleigh_tail(s2, p):
    t = cfar_threshold(s2, p)
    assert math.exp(-t * t / (2 * s2)) == pytest.approx(p, rel=1e-9)


def test_update_support_examples():
    x = np.array([3.0, 0.1, -2.0])
    np.testing.assert_array_equal(update_support(x, [0, 1, 2], 1.0), [0, 2])
    np.testing.assert_array_equal(update_support(x, [0, 1, 2], 0.0), [0, 1, 2])
    np.testing.assert_array_equal(update_support(np.array([1.0, 2.0]), [0, 1], 1.0), [1])


def test_threshold_estimate_examples():
    x = np.array([3.0, 0.1, -2.0])
    np.testing.assert_array_equal(threshold_estimate(x, []), np.zeros(3))
    np.testing.assert_array_equal(threshold_estimate(x, [0, 1, 2]), x)
    np.testing.assert_array_equal(threshold_estimate(x, [0, 2]), [3.0, 0.0, -2.0])


@given(
    st.lists(st.floats(-10, 10), min_size=1, max_size=30),
    st.floats(0, 10),
    st.data(),
)
def test_update_support_only_removes(values, t, data):
    x = np.asarray(values)
    support = data.draw(st.sets(st.integers(0, x.size - 1)))
    new = update_support(x, sorted(support), t)
    assert set(new.tolist()) <= support
    est = threshold_estimate(x, new)
    assert np.all(est[np.setdiff1d(np.arange(x.size), new)] == 0)


def test_stopping_examples():
    assert stopping_decision(0.002, 0.001) is Decision.CONTINUE_LOOP
    assert stopping_decision(0.001, 0.001) is Decision.TERMINATE
    assert stopping_decision(0.0015, 0.002) is Decision.TERMINATE


def test_cfar_config_validation():
    for bad in (dict(p_fa=0.0), dict(p_fa=1.0), dict(l_max=0), dict(lambda_init=-1.0)):
        with pytest.raises(InputError):
            CfarConfig(**bad)
    assert CfarConfig(final_estimate_policy="current").final_estimate_policy is FinalEstimatePolicy.CURRENT_ITERATE


def test_zero_measurements_give_empty_support():
    p = SensingProblem(A=np.random.default_rng(0).standard_normal((6, 12)), y=np.zeros(6))
    r = iar_lasso_admm_cfar(p)
    assert r.termination is Termination.EMPTY_SUPPORT
    assert r.sparsity_order == 0 and not r.x_hat.any()


def test_full_support_terminates_with_current_estimate():
    p = SensingProblem(A=np.eye(4), y=np.array([1.0, -2.0, 3.0, 0.5]))
    r = iar_lasso_admm_cfar(p, cfar_cfg=CfarConfig(lambda_init=1e-6))
    assert r.termination is Termination.EMPTY_SUPPORT
    assert r.sparsity_order == 4
    np.testing.assert_allclose(r.x_hat, p.y, atol=1e-3)


def test_l_max_cap():
    p = synthesize(SynthSpec(64, 128, 5, 0.05, seed=3))
    r = iar_lasso_admm_cfar(p, cfar_cfg=CfarConfig(l_max=1))
    assert r.termination is Termination.L_MAX_REACHED and len(r.records) == 1
    assert r.sparsity_order == r.records[0].support_size_after


def test_final_estimate_policies():
    p = synthesize(SynthSpec(128, 256, 8, 0.05, seed=11))
    prev = iar_lasso_admm_cfar(p, cfar_cfg=CfarConfig(final_estimate_policy="previous"))
    cur = iar_lasso_admm_cfar(p, cfar_cfg=CfarConfig(final_estimate_policy="current"))
    assert prev.termination is cur.termination is Termination.SIGMA_DECREASE
    assert len(prev.records) >= 2
    assert prev.sparsity_order == prev.records[-2].support_size_after
    assert cur.sparsity_order == cur.records[-1].support_size_after
    # sigma2_prev starts at 0, so the first iteration always continues
    assert prev.records[0].sigma2_hat > 0 and len(prev.records) > 1


def test_warm_start_lambda_follows_threshold():
    p = synthesize(SynthSpec(128, 256, 8, 0.05, seed=5))
    r = iar_lasso_admm_cfar(p)
    for a, b in zip(r.records, r.records[1:]):
        assert b.lambda_used == a.t_fa


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 10), st.sampled_from([0.01, 0.05, 0.2]))
def test_structural_invariants(seed, k, sigma):
    p = synthesize(SynthSpec(48, 96, k, sigma, seed=seed))
    cfg = CfarConfig()
    r = iar_lasso_admm_cfar(p, AdmmConfig(), cfg)
    check_invariants(r, cfg)
    assert len(r.records) <= cfg.l_max
    off = np.setdiff1d(np.arange(96), r.support)
    assert np.all(r.x_hat[off] == 0)
    assert np.all(r.x_hat[r.support] != 0)


def test_pure_noise_false_alarms():
    """k = 0: false alarms stay within the P_fa budget.

    Pilot over seeds 0..99 (M=128, N=256, sigma=0.05, P_fa=1e-3): mean k_hat 0.17,
    max 2, against P_fa * N = 0.256 expected Rayleigh false alarms.
    """
    ks = [iar_lasso_admm_cfar(synthesize(SynthSpec(128, 256, 0, 0.05, seed=s))).sparsity_order
          for s in range(100)]
    assert max(ks) <= 3
    assert np.mean(ks) <= 2 * 1e-3 * 256


@pytest.mark.slow
def test_desk_scale_support_recovery():
    """M=256, N=1024, k=30, sigma=0.05: support covers the truth and |support| within 15% of k on >= 90% of seeds."""
    good = 0
    for s in range(20):
        p = synthesize(SynthSpec(256, 1024, 30, 0.05, seed=s))
        r = iar_lasso_admm_cfar(p)
        truth = set(np.flatnonzero(p.x_true).tolist())
        if truth <= set(r.support.tolist()) and abs(r.sparsity_order - 30) <= 0.15 * 30:
            good += 1
    assert good >= 18, f"only {good}/20 seeds recovered the support"
