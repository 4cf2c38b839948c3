"""
Evidence of a conjugate normal model from posterior draws
=========================================================

Twenty-five observations, a normal likelihood with known sd 3 and a
N(0, 10^2) prior on the mean.  The evidence is known in closed form, so
the kernel density plug-in estimate can be checked directly.
"""

import numpy as np

from kdevidence.experiment import RunConfig, run_reproduce

# the default configuration, seed 1702
report = run_reproduce(RunConfig())
print("closed form :", report.log_theoretical)
print("estimate    :", report.log_estimate)
print("abs error   :", report.abs_error)

# the log-weight spread says how well the density estimate matches the
# posterior; a narrow spread means a trustworthy estimate
for key, value in report.diagnostics.items():
    print(f"  {key:>15} = {value}")

# across seeds the error stays at the level of a few thousandths
errors = np.array([run_reproduce(RunConfig(seed=s)).abs_error for s in range(20)])
print("median abs error over 20 seeds:", np.median(errors))
