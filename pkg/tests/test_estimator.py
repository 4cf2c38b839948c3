import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import REF_CONFIG, ref_dataset, random_configs
from kdevidence.errors import DensityFloorViolation, EmptyInput, NonFiniteLogWeight
from kdevidence.estimator import (
    LogWeightSet,
    compute_log_weights,
    estimate_evidence,
    estimate_log_marginal,
    estimate_with_true_posterior,
    log_sum_exp,
)
from kdevidence.kde import KdeConfig
from kdevidence.model import (
    BayesModelSpec,
    NormalModelConfig,
    PosteriorParams,
    dataset_from_values,
    normal_log_marginal_closed_form,
    normal_log_pdf,
    normal_model,
    normal_posterior_params,
)
from kdevidence.sampling import PosteriorSample, rng_new, sample_exact_posterior, sample_normal

LOG_4PI_HALF = 0.5 * np.log(4 * np.pi)


class TestLogSumExp:
    def test_large_negative(self):
        assert_allclose(log_sum_exp([-1000.0, -1000.0]), -1000 + np.log(2), rtol=0, atol=1e-12)
        assert_allclose(log_sum_exp([-1000.0, -1000.0]), -999.3068528, atol=1e-7)

    def test_singleton(self):
        assert log_sum_exp([0.0]) == 0.0

    def test_small_sum(self):
        assert_allclose(log_sum_exp(np.log([1.0, 2.0, 3.0])), np.log(6.0), rtol=1e-15)

    def test_large_positive(self):
        assert_allclose(log_sum_exp([1000.0, 1000.0 + np.log(3)]), 1000 + np.log(4), rtol=1e-15)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            log_sum_exp([])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-700, 700), min_size=1, max_size=50))
    def test_matches_naive_in_safe_range(self, values):
        assert_allclose(log_sum_exp(values), np.log(np.sum(np.exp(values))), rtol=1e-12, atol=1e-12)


class TestEstimateLogMarginal:
    def weights(self, values):
        return LogWeightSet(np.asarray(values, dtype=float))

    def test_constant(self):
        est = estimate_log_marginal(self.weights([-3.25] * 10))
        assert_allclose(est.log_evidence, -3.25, atol=1e-14)
        assert est.log_weight_sd == 0.0

    def test_arithmetic_mean(self):
        est = estimate_log_marginal(self.weights(np.log([2.0, 4.0])))
        assert_allclose(est.log_evidence, np.log(3.0), rtol=1e-15)
        assert_allclose(est.log_evidence, 1.0986123, atol=1e-7)

    def test_diagnostics(self):
        lw = [-1.0, -2.0, -0.5]
        est = estimate_log_marginal(self.weights(lw))
        assert est.n_samples == 3
        assert est.log_weight_range == (-2.0, -0.5)
        assert_allclose(est.log_weight_sd, np.std(lw))

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.floats(-500, 500), min_size=2, max_size=100),
        st.floats(-1e3, 1e3),
    )
    def test_shift_and_range(self, lw, c):
        est = estimate_log_marginal(self.weights(lw))
        shifted = estimate_log_marginal(self.weights(np.asarray(lw) + c))
        assert abs(shifted.log_evidence - est.log_evidence - c) <= 1e-12 * max(1.0, abs(c), abs(est.log_evidence))
        assert est.log_weight_min - 1e-12 <= est.log_evidence <= est.log_weight_max + 1e-12

    def test_permutation_invariance(self):
        lw = np.random.default_rng(0).normal(-66, 0.1, size=1000)
        base = estimate_log_marginal(self.weights(lw)).log_evidence
        rng = np.random.default_rng(1)
        for _ in range(10):
            perm = estimate_log_marginal(self.weights(rng.permutation(lw))).log_evidence
            assert abs(perm - base) <= 1e-12

    def test_deterministic(self):
        lw = self.weights(np.random.default_rng(2).normal(size=100))
        assert estimate_log_marginal(lw).log_evidence == estimate_log_marginal(lw).log_evidence


class TestComputeLogWeights:
    def test_exact_posterior_gives_constant_weights(self, ref_model, ref_data, ref_posterior):
        s = sample_exact_posterior(rng_new(1), ref_posterior, 500)
        w = compute_log_weights(
            ref_model, ref_data, s,
            lambda t: np.exp(normal_log_pdf(t, ref_posterior.mean, ref_posterior.variance)),
        )
        closed = normal_log_marginal_closed_form(ref_data, REF_CONFIG)
        assert np.max(np.abs(w.log_weights - closed)) <= 1e-9
        assert w.n_clamped == 0

    def test_draw_order(self, ref_model, ref_data):
        s = PosteriorSample([0.5, -1.0, 2.0])
        w = compute_log_weights(ref_model, ref_data, s, lambda t: np.full_like(t, 0.25))
        expected = [ref_model.log_target(t, ref_data) - np.log(0.25) for t in s.draws]
        assert_allclose(w.log_weights, expected, rtol=1e-15)

    def test_zero_density_raises(self, ref_model, ref_data):
        s = PosteriorSample([0.5, -1.0, 2.0])
        with pytest.raises(DensityFloorViolation) as info:
            compute_log_weights(ref_model, ref_data, s, lambda t: np.where(t > 1, 0.0, 0.3))
        assert info.value.theta == 2.0

    def test_floor_is_inclusive(self, ref_model, ref_data):
        s = PosteriorSample([0.5, -1.0])
        with pytest.raises(DensityFloorViolation):
            compute_log_weights(ref_model, ref_data, s, lambda t: np.full_like(t, 1e-300))

    def test_clamp_counts(self, ref_model, ref_data):
        s = PosteriorSample([0.5, -1.0, 2.0])
        w = compute_log_weights(ref_model, ref_data, s, lambda t: np.where(t > 0, 0.0, 0.3), clamp=True)
        assert w.n_clamped == 2
        assert np.all(np.isfinite(w.log_weights))

    def test_non_finite_weight(self, ref_data):
        model = BayesModelSpec(lambda t, d: np.where(np.asarray(t) > 0, -np.inf, 0.0), lambda t: 0.0 * np.asarray(t))
        with pytest.raises(NonFiniteLogWeight):
            compute_log_weights(model, ref_data, PosteriorSample([-1.0, 1.0]), lambda t: np.ones_like(t))

    def test_kde_weights_nearly_constant(self, ref_model, ref_data, ref_posterior):
        s = sample_exact_posterior(rng_new(1702), ref_posterior, 1000)
        est = estimate_evidence(ref_model, ref_data, s)
        assert est.log_weight_sd < 0.5


class TestTruePosterior:
    def test_n1(self):
        cfg = NormalModelConfig(1, 0, 1)
        data = dataset_from_values([0.0])
        post = normal_posterior_params(data, cfg)
        est = estimate_with_true_posterior(normal_model(cfg), data, PosteriorSample([0.3, -2.0]), post)
        assert abs(est.log_evidence + LOG_4PI_HALF) <= 1e-10

    def test_ref_config_two_draws(self, ref_model, ref_data, ref_posterior):
        s = sample_exact_posterior(rng_new(3), ref_posterior, 2)
        est = estimate_with_true_posterior(ref_model, ref_data, s, ref_posterior)
        assert abs(est.log_evidence - normal_log_marginal_closed_form(ref_data, REF_CONFIG)) <= 1e-10

    def test_wrong_posterior_detected(self, ref_model, ref_data, ref_posterior):
        s = sample_exact_posterior(rng_new(3), ref_posterior, 200)
        wrong = PosteriorParams(ref_posterior.mean + 0.5, ref_posterior.variance)
        est = estimate_with_true_posterior(ref_model, ref_data, s, wrong)
        closed = normal_log_marginal_closed_form(ref_data, REF_CONFIG)
        assert np.isfinite(est.log_evidence)
        assert abs(est.log_evidence - closed) > 1e-3
        assert est.log_weight_sd > 0

    @pytest.mark.parametrize("data,cfg", random_configs(25, seed=21))
    def test_identity_random_configs(self, data, cfg):
        post = normal_posterior_params(data, cfg)
        s = sample_exact_posterior(rng_new(data.n), post, 50)
        est = estimate_with_true_posterior(normal_model(cfg), data, s, post)
        assert abs(est.log_evidence - normal_log_marginal_closed_form(data, cfg)) <= 1e-10


class TestKdeEstimator:
    @pytest.mark.parametrize("seed", [1702, 1, 2, 3])
    def test_ref_pipeline(self, seed):
        data = ref_dataset(seed)
        post = normal_posterior_params(data, REF_CONFIG)
        s = sample_exact_posterior(rng_new(seed + 10_000), post, 1000)
        est = estimate_evidence(normal_model(REF_CONFIG), data, s)
        assert abs(est.log_evidence - normal_log_marginal_closed_form(data, REF_CONFIG)) <= 0.05

    def test_grid_mode_close_to_direct(self, ref_model, ref_data, ref_posterior):
        s = sample_exact_posterior(rng_new(8), ref_posterior, 1000)
        direct = estimate_evidence(ref_model, ref_data, s, KdeConfig(eval_mode="direct"))
        grid = estimate_evidence(ref_model, ref_data, s, KdeConfig(eval_mode="grid-interp"))
        assert abs(direct.log_evidence - grid.log_evidence) < 1e-3
        assert grid.config_echo["kde"]["eval_mode"] == "grid-interp"

    def test_large_n_does_not_underflow(self):
        # likelihood around exp(-14000): the naive mean(exp(.)) is 0
        cfg = NormalModelConfig(1.0, 0.0, 5.0)
        data = dataset_from_values(sample_normal(rng_new(4), 2.0, 1.0, 10_000))
        post = normal_posterior_params(data, cfg)
        s = sample_exact_posterior(rng_new(5), post, 2000)
        est = estimate_evidence(normal_model(cfg), data, s)
        closed = normal_log_marginal_closed_form(data, cfg)
        assert closed < -10_000
        assert abs(est.log_evidence - closed) <= 0.05

    def test_mcmc_sample(self, ref_model, ref_data, ref_posterior):
        from kdevidence.sampling import MhConfig, metropolis_sample

        cfg = MhConfig(2.4 * ref_posterior.sd, 1000 + 4000 * 5, 0.0, burn_in=1000, thinning=5)
        s = metropolis_sample(rng_new(12), ref_model, ref_data, cfg)
        est = estimate_evidence(ref_model, ref_data, s)
        assert abs(est.log_evidence - normal_log_marginal_closed_form(ref_data, REF_CONFIG)) <= 0.05
        assert est.config_echo["sample"]["kind"] == "mcmc"

    def test_mismatched_sample_is_finite_but_wrong(self, ref_model, ref_data):
        # the KDE always covers its own draws, so a wrong sample shows up in
        # the estimate and the weight spread rather than as an error
        s = PosteriorSample(sample_normal(rng_new(1), 50.0, 0.1, 200))
        est = estimate_evidence(ref_model, ref_data, s)
        closed = normal_log_marginal_closed_form(ref_data, REF_CONFIG)
        assert np.isfinite(est.log_evidence)
        assert est.log_evidence < closed - 10
