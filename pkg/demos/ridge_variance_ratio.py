"""How much extra variance do fresh covariates cost a ridge fit?

Sweeps the ridge penalty and prints the ratio of fresh-point prediction
variance to in-sample prediction variance under an isotropic normal
design.  Near lambda = 0 the ratio is far above one (the least-squares
excess).  As the penalty grows the fit flattens and the ratio drops
*below* one -- at a fresh point the shrunken fit varies less than at the
training rows it was shrunk toward -- approaching n / (n + p + 1).
"""

from randomx_eval import (
    ridge_ratio_limit_normal,
    run_ridge_ratio_study,
)

n, p = 120, 40
curve = run_ridge_ratio_study(n=n, p=p, reps=60, seed=0, threads=2)

print(f"ridge, isotropic normal design, n={n}, p={p}, {curve.reps} replicates")
print(f"{'lambda':>12} {'V_r / V_s':>12}   95% CI")
for lam, r, lo, hi in zip(curve.lambdas[::3], curve.ratio[::3],
                          curve.ci_low[::3], curve.ci_high[::3]):
    marker = "  <- below 1" if r < 1.0 else ""
    print(f"{lam:12.1f} {r:12.4f}   [{lo:.4f}, {hi:.4f}]{marker}")

cross = next(lam for lam, r in zip(curve.lambdas, curve.ratio) if r < 1.0)
print(f"\nfirst grid penalty with ratio < 1: lambda = {cross:.1f}")
print(f"heavy-penalty limit n/(n+p+1) = {ridge_ratio_limit_normal(n, p):.4f} "
      f"(measured at lambda=1e6: {curve.ratio[-1]:.4f})")
