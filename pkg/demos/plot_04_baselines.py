"""
Likelihood-based competitors
============================

For the OU process the transition law is Gaussian, so the exact maximum
likelihood estimator is available.  A single Newton step on the score from
the smooth-and-match estimate gets close to it at a fraction of the work.
"""

from smoothmatch import (
    LikelihoodParts,
    OuModel,
    SeedSpec,
    efficiency_bound,
    kessler_estimator,
    one_step,
    ou_mle,
    sample_ou_exact,
    sm_estimator,
)

for delta in (0.01, 0.1, 1.0):
    sample = sample_ou_exact(OuModel(2.0, 1.0, delta), 199, SeedSpec(5))
    parts = LikelihoodParts(sample)
    sm = sm_estimator(sample).theta_hat
    step = one_step(sm, sample, parts=parts)
    mle = ou_mle(sample)
    print(
        f"delta={delta:<5} sm={sm:7.3f}  one-step={step.theta_bar:7.3f}  "
        f"kessler={kessler_estimator(sample):7.3f}  mle={mle:7.3f}  score(mle)={parts.score(mle):.1e}"
    )

# %%
# The efficiency bound 1 / ((n+1) I) for n = 199.
print()
for delta in (0.01, 0.05, 0.1, 1.0):
    print(f"EB(delta={delta}) = {efficiency_bound(2.0, 1.0, delta, 200):.4f}")
