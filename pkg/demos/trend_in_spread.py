"""
Testing for a trend in spread, not just a difference
====================================================

Dose-response settings often order the groups: variability should rise
with dose if it rises at all.  The omnibus Levene test spends power on
every possible difference; the trend test spends it all on the ordered
alternative and wins when the ordering is real.
"""

import numpy as np

from vartests import GroupedSample, levene_test, trend_test

rng = np.random.default_rng(11)

# Four dose groups whose standard deviations climb 1.0 -> 1.6.
sample = GroupedSample(
    tuple(
        (f"dose-{level}", rng.normal(0.0, 1.0 + 0.2 * i, size=12))
        for i, level in enumerate(("0", "low", "mid", "high"))
    )
)

omnibus = levene_test(sample, center="median")
print(f"   omnibus Levene:  F = {omnibus.statistic:.3f},  p = {omnibus.p_value:.4f}")

# Linear scores 1,2,3,4 are the default; they stay close to optimal even
# when the true spread profile bends.
trend = trend_test(sample, center="median")
print(f"   trend test:      z = {trend.z_statistic:.3f}")
print(f"     slope of mean |deviation| per score step: {trend.beta_hat:.4f}")
print(f"     p (increasing): {trend.p_increasing:.4f}")
print(f"     p (decreasing): {trend.p_decreasing:.4f}")
print(f"     p (two-sided):  {trend.p_two_sided:.4f}")

# If the doses were on a log scale you might prefer custom scores:
log_scores = trend_test(sample, center="median", scores=(1.0, 2.0, 4.0, 8.0))
print(f"   with scores 1,2,4,8: z = {log_scores.z_statistic:.3f}, "
      f"p (increasing) = {log_scores.p_increasing:.4f}")
