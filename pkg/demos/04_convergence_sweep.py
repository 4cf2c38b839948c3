"""
How the error shrinks with the number of posterior draws
========================================================

Each cell of the sweep simulates a posterior sample with its own derived
seed and records the absolute error against the closed form.  The median
error per sample size falls steadily.
"""

import numpy as np

from kdevidence import KdeConfig
from kdevidence.experiment import RunConfig, median_abs_error, run_sweep

config = RunConfig(kde=KdeConfig(eval_mode="grid-interp"))
sizes = [250, 1000, 4000, 16000]
rows = run_sweep(config, sizes, replications=30)

medians = median_abs_error(rows)
for n in sizes:
    print(f"N={n:6d}  median abs error {medians[n]:.2e}")

# a rough rate: slope of log median error against log N
slope = np.polyfit(np.log(sizes), np.log([medians[n] for n in sizes]), 1)[0]
print("fitted slope:", round(slope, 2))
