"""Regression estimators of the automation-harm gradient.

All standard errors are the conventional homoskedastic ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (IncompletePanelError, SingularDesignError, SparseWindowError,
                     WeakInstrumentError)
from .simulation import IncidentDataset

WEAK_INSTRUMENT_F = 10.0
MIN_SIDE_ROWS = 20


@dataclass(frozen=True)
class EstimateReport:
    method: str
    point: float
    std_error: float
    n_used: int
    diagnostics: dict = field(default_factory=dict)


def _ols_fit(X: np.ndarray, y: np.ndarray):
    """Coefficients, their covariance and residuals.

    Raises SingularDesignError on a rank-deficient design or when there are
    not more rows than columns.
    """
    n, k = X.shape
    if n <= k:
        raise SingularDesignError(f"{n} rows cannot identify {k} coefficients")
    if np.linalg.matrix_rank(X) < k:
        raise SingularDesignError("design matrix is rank deficient")
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    sigma2 = float(resid @ resid) / (n - k)
    cov = sigma2 * np.linalg.inv(X.T @ X)
    return beta, cov, resid


def _se(cov, i):
    return float(np.sqrt(max(cov[i, i], 0.0)))


def estimate_ols(ds: IncidentDataset, outcome: str = "harmed",
                 regressors: Sequence[str] = ("a_level",)) -> EstimateReport:
    """OLS of ``outcome`` on an intercept and ``regressors``.

    Reports the coefficient on the first regressor. Leaving out the
    covariate gives the naive (confounded) comparison.
    """
    regressors = list(regressors)
    if not regressors:
        raise ValueError("need at least one regressor")
    y = ds.column(outcome).astype(float)
    X = np.column_stack([np.ones(len(ds))] + [ds.column(r).astype(float) for r in regressors])
    if len(ds) <= len(regressors) + 1:
        raise SingularDesignError("need more rows than regressors + 1")
    beta, cov, _ = _ols_fit(X, y)
    return EstimateReport("OLS", float(beta[1]), _se(cov, 1), len(ds))


def estimate_iv_2sls(ds: IncidentDataset, min_first_stage_f: float = WEAK_INSTRUMENT_F) -> EstimateReport:
    """Two-stage least squares with ``instrument`` for ``a_level``, controlling for ``covariate``.

    Stage one regresses A on (1, Z, X); stage two regresses H on
    (1, A_hat, X). Residuals for the standard error use the observed A.
    A first-stage F below ``min_first_stage_f`` raises WeakInstrumentError.
    """
    n = len(ds)
    ones = np.ones(n)
    a = ds.a_level
    h = ds.harmed.astype(float)
    W = np.column_stack([ones, ds.instrument, ds.covariate])
    gamma, cov1, _ = _ols_fit(W, a)
    se_z = _se(cov1, 1)
    f_stat = float((gamma[1] / se_z) ** 2) if se_z > 0 else np.inf
    if not f_stat >= min_first_stage_f:
        raise WeakInstrumentError(
            f"weak instrument: first-stage F = {f_stat:.3g} < {min_first_stage_f:g}")
    a_hat = W @ gamma
    D = np.column_stack([ones, a_hat, ds.covariate])
    beta, *_ = np.linalg.lstsq(D, h, rcond=None)
    if np.linalg.matrix_rank(D) < D.shape[1]:
        raise SingularDesignError("second-stage design is rank deficient")
    resid = h - np.column_stack([ones, a, ds.covariate]) @ beta
    sigma2 = float(resid @ resid) / (n - D.shape[1])
    cov = sigma2 * np.linalg.inv(D.T @ D)
    return EstimateReport("IV2SLS", float(beta[1]), _se(cov, 1), n,
                          {"first_stage_f": f_stat})


def estimate_did(ds: IncidentDataset) -> EstimateReport:
    """Two-way fixed-effects regression of harm on Treat x Post.

    Treatment status comes from ``ds.treated_groups`` and ``ds.post_start``.
    Every group x period cell must contain at least one row.
    """
    if ds.treated_groups is None or ds.post_start is None:
        raise IncompletePanelError("dataset carries no treatment assignment")
    groups = np.unique(ds.group)
    periods = np.unique(ds.time)
    if len(groups) < 2 or len(periods) < 2:
        raise IncompletePanelError(
            f"need >= 2 groups and >= 2 periods, got {len(groups)} and {len(periods)}")
    g_idx = np.searchsorted(groups, ds.group)
    t_idx = np.searchsorted(periods, ds.time)
    counts = np.zeros((len(groups), len(periods)), dtype=int)
    np.add.at(counts, (g_idx, t_idx), 1)
    if np.any(counts == 0):
        gi, ti = np.argwhere(counts == 0)[0]
        raise IncompletePanelError(f"no rows for group {groups[gi]} in period {periods[ti]}")

    treat_post = np.isin(ds.group, ds.treated_groups) & (ds.time >= ds.post_start)
    n = len(ds)
    group_dummies = (g_idx[:, None] == np.arange(len(groups))).astype(float)
    period_dummies = (t_idx[:, None] == np.arange(1, len(periods))).astype(float)
    X = np.column_stack([treat_post.astype(float), group_dummies, period_dummies])
    beta, cov, _ = _ols_fit(X, ds.harmed.astype(float))
    return EstimateReport("DID", float(beta[0]), _se(cov, 0), n)


def estimate_rd(ds: IncidentDataset, bandwidth: float) -> EstimateReport:
    """Sharp regression discontinuity at ``ds.rd_cutoff``.

    Separate local-linear fits (uniform kernel) within ``bandwidth`` on each
    side; the jump is the difference of the two intercepts at the cutoff.
    """
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    c = ds.rd_cutoff
    r = ds.running_var - c
    h = ds.harmed.astype(float)
    left = (r < 0) & (r >= -bandwidth)
    right = (r >= 0) & (r <= bandwidth)
    for side, mask in (("left", left), ("right", right)):
        if mask.sum() < MIN_SIDE_ROWS:
            raise SparseWindowError(
                f"only {int(mask.sum())} rows {side} of the cutoff within bandwidth {bandwidth:g}; "
                f"need {MIN_SIDE_ROWS}")
    fits = []
    for mask in (left, right):
        X = np.column_stack([np.ones(int(mask.sum())), r[mask]])
        beta, cov, _ = _ols_fit(X, h[mask])
        fits.append((beta[0], cov[0, 0]))
    (b_l, v_l), (b_r, v_r) = fits
    return EstimateReport("RD", float(b_r - b_l), float(np.sqrt(v_l + v_r)),
                          int(left.sum() + right.sum()),
                          {"bandwidth": float(bandwidth), "n_left": int(left.sum()),
                           "n_right": int(right.sum())})
