"""k-nearest-neighbours: all the excess error is bias.

A k-NN prediction is an average of exactly k responses whether the query
is a training row or a fresh point, so the prediction *variance* is
sigma2/k either way and the excess variance is exactly zero -- not small,
zero.  The excess error at fresh points is pure bias, and the in-sample
bias obeys a neat identity: each training point is its own nearest
neighbour, so the (n, k) rule at a training point is a noiseless vote
plus the (k-1) nearest of the *other* n-1 points, giving

    E[in-sample bias of (n, k)] = (1 - 1/k)^2 * E[fresh bias of (n-1, k-1)]
"""

import numpy as np

from randomx_eval import (
    CovariateModel,
    MeanModel,
    NoiseModel,
    ScenarioConfig,
    SmootherSpec,
    conditional_moments,
    draw_covariates,
    estimate_decomposition,
    stream,
)

cov = CovariateModel.isotropic(2)
mean = MeanModel.abs_sum(1.0)

# ---- excess variance is identically zero --------------------------------
sc = ScenarioConfig(covariates=cov, mean=mean, noise=NoiseModel(1.0),
                    n=150, test_m=150, reps=200, seed=5, name="knn")
est = estimate_decomposition(sc, SmootherSpec.knn(8))
print(f"k-NN (k=8, n=150): V = {est.V:.4f} (= sigma2/k = {1/8:.4f}), "
      f"V+ = {est.Vplus} exactly")
print(f"excess bias B+ = {est.Bplus:.4f} +- {est.se_Bplus:.4f}\n")

# ---- the in-sample / fresh-point bias identity --------------------------
n, k, reps, seed = 200, 10, 400, 11
spec_nk = SmootherSpec.knn(k)
spec_small = SmootherSpec.knn(k - 1)
lhs = np.empty(reps)
rhs = np.empty(reps)
for r in range(reps):
    X = draw_covariates(cov, n, stream(seed, r, 0))
    X0 = draw_covariates(cov, n, stream(seed, r, 2))
    fX, f0 = mean.evaluate(X), mean.evaluate(X0)
    lhs[r] = conditional_moments(spec_nk, X, X0, fX, f0, 1.0).bias_s
    rhs[r] = conditional_moments(spec_small, X[1:], X0, fX[1:], f0, 1.0).bias_r

factor = (1.0 - 1.0 / k) ** 2
d = lhs - factor * rhs
print(f"in-sample bias of ({n},{k}) rule:             {lhs.mean():.5f}")
print(f"(1-1/k)^2 * fresh bias of ({n - 1},{k - 1}) rule:  {factor * rhs.mean():.5f}")
print(f"paired gap {d.mean():.5f} +- {d.std(ddof=1) / np.sqrt(reps):.5f}")
