"""Simulation studies: decomposition tables, criteria MSE comparison, ridge ratio.

The criteria study scores each criterion against a per-replicate target

    errR_rep = sigma^2 + mean over a fresh test set of (f - fhat)^2,

i.e. the trained model's true conditional Random-X error with the noise
variance added analytically (no test responses are drawn).  Reported MSE,
bias and variance are moments of (criterion - errR_rep) across replicates.

The ridge ratio study tracks Var_R / Var_S for ridge as the penalty grows:
above 1 for small penalties, dipping below 1 past a crossover, and
approaching tr(E[X'X] E[X'X]) / tr(E[(X'X)^2]) as the penalty diverges —
``n / (n + p + 1)`` for isotropic normal covariates.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ._pool import run_replicates
from .criteria import bplus_hat, gcv, ocv, rcp, rcp_hat
from .datagen import (
    NOISE,
    TEST,
    TRAIN,
    CovariateModel,
    MeanModel,
    NoiseModel,
    draw_covariates,
    draw_response,
    stream,
)
from .decomp import DecompositionEstimate, estimate_decomposition
from .linalg import symmetric_eigen
from .smoothers import FittedSmoother, SmootherSpec, fit, predict

__all__ = [
    "ScenarioConfig",
    "CriteriaMseRow",
    "RidgeRatioCurve",
    "err_r_target",
    "run_decomposition_study",
    "run_criteria_study",
    "run_ridge_ratio_study",
    "ridge_ratio_limit_normal",
    "ridge_ratio_limit_mc",
    "CRITERIA_METHODS",
]

#: Criteria compared by `run_criteria_study`, in output order.
CRITERIA_METHODS = ("RCp", "RCpHat", "GCV", "RCpPlus", "OCV")


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation cell: covariate law, mean, noise, and sizes.

    ``test_m`` is the fresh-test-set size used for the criteria study's
    target; ``reps`` the default replicate count; ``seed`` the master seed
    all per-replicate streams derive from.
    """

    covariates: CovariateModel
    mean: MeanModel
    noise: NoiseModel
    n: int
    test_m: int = 10_000
    reps: int = 1000
    seed: int = 0
    name: str = ""

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.test_m < 1:
            raise ValueError("test_m must be >= 1")
        if self.reps < 2:
            raise ValueError("reps must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")

    @property
    def p(self) -> int:
        return self.covariates.p

    def override(self, reps: int | None = None, seed: int | None = None) -> "ScenarioConfig":
        """Copy with replicate count and/or seed replaced (None keeps)."""
        out = self
        if reps is not None:
            out = replace(out, reps=reps)
        if seed is not None:
            out = replace(out, seed=seed)
        return out


def err_r_target(
    fitted: FittedSmoother, X_test: np.ndarray, f_test: np.ndarray, sigma2: float
) -> float:
    """Conditional Random-X error of a trained model on a given test set."""
    if not (np.isfinite(sigma2) and sigma2 >= 0.0):
        raise ValueError("sigma2 must be finite and >= 0")
    f_test = np.asarray(f_test, dtype=float)
    pred = predict(fitted, X_test)
    return sigma2 + float(np.mean((f_test - pred) ** 2))


# --------------------------------------------------------------------------
# decomposition study
# --------------------------------------------------------------------------

def run_decomposition_study(
    scenarios: list[ScenarioConfig],
    smoother: SmootherSpec | None = None,
    reps: int | None = None,
    threads: int = 1,
) -> list[tuple[ScenarioConfig, DecompositionEstimate]]:
    """Decomposition estimates for each scenario (default: least squares)."""
    smoother = smoother or SmootherSpec.least_squares()
    return [
        (sc, estimate_decomposition(sc, smoother, reps=reps, threads=threads))
        for sc in scenarios
    ]


# --------------------------------------------------------------------------
# criteria MSE study
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CriteriaMseRow:
    """Accuracy of one criterion in one scenario.

    ``mse = bias2 + variance`` holds by construction; ``rel_to_ocv`` is this
    method's MSE over OCV's in the same scenario (1 for OCV itself).
    """

    scenario: str
    method: str
    mse: float
    bias2: float
    variance: float
    rel_to_ocv: float


def run_criteria_study(
    scenario: ScenarioConfig, reps: int | None = None, threads: int = 1
) -> list[CriteriaMseRow]:
    """Score RCp, RCpHat, GCV, RCpPlus and OCV against errR_rep.

    Least squares is fit per replicate with the scenario's known noise
    variance used where a criterion needs it; the same fit and test draw
    score every method, so the comparison is paired.
    """
    reps = scenario.reps if reps is None else int(reps)
    if reps < 2:
        raise ValueError("reps must be >= 2")
    n, p = scenario.n, scenario.p
    if n <= p + 1:
        raise ValueError("criteria study needs n > p + 1")
    sigma2 = scenario.noise.sigma2
    seed = scenario.seed
    spec = SmootherSpec.least_squares()

    def one_rep(r: int) -> tuple[float, ...]:
        X = draw_covariates(scenario.covariates, n, stream(seed, r, TRAIN))
        Y, _ = draw_response(X, scenario.mean, scenario.noise, stream(seed, r, NOISE))
        model = fit(spec, X, Y)
        resid = model.residuals
        rss = float(resid @ resid)
        rcp_v = rcp(rss, n, p, sigma2)
        values = (
            rcp_v,
            rcp_hat(rss, n, p),
            gcv(rss, n, p),
            rcp_v + bplus_hat(resid, model.hat_diag, sigma2),
            ocv(resid, model.hat_diag),
        )
        X_test = draw_covariates(scenario.covariates, scenario.test_m, stream(seed, r, TEST))
        target = err_r_target(model, X_test, scenario.mean.evaluate(X_test), sigma2)
        return tuple(v - target for v in values)

    dev = np.array(run_replicates(one_rep, reps, threads, seed))
    mse = np.mean(dev**2, axis=0)
    bias = np.mean(dev, axis=0)
    variance = mse - bias**2
    mse_ocv = mse[CRITERIA_METHODS.index("OCV")]
    return [
        CriteriaMseRow(
            scenario=scenario.name,
            method=method,
            mse=float(mse[i]),
            bias2=float(bias[i] ** 2),
            variance=float(variance[i]),
            rel_to_ocv=float(mse[i] / mse_ocv),
        )
        for i, method in enumerate(CRITERIA_METHODS)
    ]


# --------------------------------------------------------------------------
# ridge variance ratio study
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RidgeRatioCurve:
    """Mean Var_R / Var_S for ridge over a penalty grid, with 95% bands."""

    n: int
    p: int
    reps: int
    lambdas: np.ndarray = field(repr=False)
    ratio: np.ndarray = field(repr=False)
    ci_low: np.ndarray = field(repr=False)
    ci_high: np.ndarray = field(repr=False)
    theoretical_limit: float


def ridge_ratio_limit_normal(n: int, p: int) -> float:
    """Infinite-penalty limit of Var_R/Var_S for isotropic normal rows.

    ``tr(E[X'X] E[X'X]) / tr(E[(X'X)^2]) = n / (n + p + 1)`` since
    ``E[X'X] = n I`` and ``E[(X'X)^2] = n (n + p + 1) I``.
    """
    if n < 1 or p < 1:
        raise ValueError("need n >= 1 and p >= 1")
    return n / (n + p + 1.0)


def ridge_ratio_limit_mc(
    model: CovariateModel, n: int, reps: int, seed: int = 0
) -> float:
    """Monte Carlo version of the infinite-penalty limit for any row law."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    p = model.p
    sum_G = np.zeros((p, p))
    sum_G2 = np.zeros((p, p))
    for r in range(reps):
        X = draw_covariates(model, n, stream(seed, r, TRAIN))
        G = X.T @ X
        sum_G += G
        sum_G2 += G @ G
    mean_G = sum_G / reps
    mean_G2 = sum_G2 / reps
    return float(np.trace(mean_G @ mean_G) / np.trace(mean_G2))


def run_ridge_ratio_study(
    n: int = 300,
    p: int = 100,
    lambdas: np.ndarray | None = None,
    reps: int = 100,
    seed: int = 0,
    threads: int = 1,
) -> RidgeRatioCurve:
    """Estimate the ridge Var_R / Var_S curve over a penalty grid.

    Per replicate, training and test matrices of n isotropic normal rows are
    drawn and the exact conditional variances are formed from the spectrum
    of X'X, so one eigendecomposition serves the whole grid.
    """
    if not 1 <= p < n:
        raise ValueError("need 1 <= p < n")
    if reps < 2:
        raise ValueError("reps must be >= 2")
    if lambdas is None:
        lambdas = np.logspace(0.0, 6.0, 40)
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.ndim != 1 or np.any(lambdas <= 0):
        raise ValueError("lambdas must be a 1-D positive grid")
    model = CovariateModel.isotropic(p)

    def one_rep(r: int) -> np.ndarray:
        X = draw_covariates(model, n, stream(seed, r, TRAIN))
        X0 = draw_covariates(model, n, stream(seed, r, TEST))
        eig = symmetric_eigen(X.T @ X)
        d = eig.eigenvalues
        U = eig.eigenvectors
        G0 = X0.T @ X0
        g = np.einsum("ij,ij->j", U, G0 @ U)  # diag(U' G0 U)
        shrink = 1.0 / (d[None, :] + lambdas[:, None]) ** 2
        var_s = (d**2 * shrink).sum(axis=1)
        var_r = (g * d * shrink).sum(axis=1)
        return var_r / var_s

    ratios = np.array(run_replicates(one_rep, reps, threads, seed))
    mean = ratios.mean(axis=0)
    half = 1.96 * ratios.std(axis=0, ddof=1) / np.sqrt(reps)
    return RidgeRatioCurve(
        n=n,
        p=p,
        reps=reps,
        lambdas=lambdas,
        ratio=mean,
        ci_low=mean - half,
        ci_high=mean + half,
        theoretical_limit=ridge_ratio_limit_normal(n, p),
    )
