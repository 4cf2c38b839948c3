"""
Plugging in the true posterior density
======================================

If the density in the denominator is the exact posterior, every weight
equals the evidence and the estimator is exact for any sample size.  The
remaining error of the kernel version is therefore pure density error.
"""

from kdevidence import (
    KdeConfig,
    NormalModelConfig,
    dataset_from_values,
    estimate_evidence,
    estimate_with_true_posterior,
    normal_log_marginal_closed_form,
    normal_model,
    normal_posterior_params,
    rng_new,
    sample_exact_posterior,
)

rng = rng_new(11)
config = NormalModelConfig(sigma=3.0, theta0=0.0, sigma0=10.0)
data = dataset_from_values(rng.normal(-1.0, 3.0, 25))
model = normal_model(config)
posterior = normal_posterior_params(data, config)
closed = normal_log_marginal_closed_form(data, config)

# a handful of draws is enough when the density is exact
for n in (2, 10, 1000):
    sample = sample_exact_posterior(rng, posterior, n)
    exact = estimate_with_true_posterior(model, data, sample, posterior)
    print(f"n={n:5d}  exact plug-in error {abs(exact.log_evidence - closed):.2e}")

# with a kernel density the error shrinks as the sample grows
for n in (250, 2000, 16000):
    sample = sample_exact_posterior(rng, posterior, n)
    est = estimate_evidence(model, data, sample, KdeConfig(eval_mode="grid-interp"))
    print(f"n={n:5d}  kde plug-in error   {abs(est.log_evidence - closed):.2e}")
