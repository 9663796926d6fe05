"""
Choosing the bandwidth by quasi-optimality
===========================================

The estimate is computed along a geometric grid of bandwidths and the
bandwidth where consecutive estimates move the least is retained.
"""

import numpy as np

from smoothmatch import OuModel, SeedSpec, bandwidth_grid, sample_ou_exact, sm_estimator

model = OuModel(2.0, 1.0, 0.1)
sample = sample_ou_exact(model, 199, SeedSpec(4))

# %%
# Estimates along the grid h_max * 0.9^i.
hs = bandwidth_grid(sample)
thetas = np.array([sm_estimator(sample, bandwidth=h).theta_hat for h in hs])
jumps = np.abs(np.diff(thetas))
print("    h      theta   |jump|")
for h, t, j in zip(hs, thetas, np.append(jumps, np.nan)):
    print(f"{h:6.3f}  {t:8.4f}  {j:7.4f}")

# %%
# The automatic choice is the pair with the smallest jump.
auto = sm_estimator(sample)
print(f"\nselected h = {auto.bandwidth:.4f}, theta = {auto.theta_hat:.4f}")
