"""Linear and quadratic surrogate fits of the objective."""

from itertools import combinations

import numpy as np

from .common import MISSING, ratio

META_NAMES = [
    "ela_meta.lin_simple.adj_r2",
    "ela_meta.lin_simple.intercept",
    "ela_meta.lin_simple.coef.min",
    "ela_meta.lin_simple.coef.max",
    "ela_meta.lin_simple.coef.max_by_min",
    "ela_meta.lin_w_interact.adj_r2",
    "ela_meta.quad_simple.adj_r2",
    "ela_meta.quad_simple.cond",
    "ela_meta.quad_w_interact.adj_r2",
]


def _interactions(X: np.ndarray) -> np.ndarray:
    pairs = list(combinations(range(X.shape[1]), 2))
    if not pairs:
        return np.empty((X.shape[0], 0))
    return np.column_stack([X[:, i] * X[:, j] for i, j in pairs])


def fit_ols(F: np.ndarray, y: np.ndarray):
    """Least squares with intercept on predictor matrix ``F``.

    Returns ``(coef, adj_r2)`` where ``coef[0]`` is the intercept, or ``None``
    when there are not more observations than coefficients. Rank-deficient
    designs (e.g. one-hot blocks) get the minimum-norm solution.
    """
    n, k = F.shape
    if n <= k + 1:
        return None
    A = np.column_stack([np.ones(n), F])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss_res = float(resid @ resid)
    centred = y - y.mean()
    ss_tot = float(centred @ centred)
    if ss_tot == 0:
        adj = MISSING
    else:
        r2 = 1.0 - ss_res / ss_tot
        adj = 1.0 - (1.0 - r2) * (n - 1) / (n - k - 1)
    return coef, adj


def ela_meta(sample) -> dict[str, float]:
    X = np.asarray(sample.matrix, dtype=float)
    y = np.asarray(sample.y, dtype=float)
    p = X.shape[1]
    inter = _interactions(X)
    out = dict.fromkeys(META_NAMES, MISSING)

    lin = fit_ols(X, y)
    if lin is not None:
        coef, adj = lin
        slopes = np.abs(coef[1:])
        out["ela_meta.lin_simple.adj_r2"] = adj
        out["ela_meta.lin_simple.intercept"] = float(coef[0])
        out["ela_meta.lin_simple.coef.min"] = float(slopes.min())
        out["ela_meta.lin_simple.coef.max"] = float(slopes.max())
        out["ela_meta.lin_simple.coef.max_by_min"] = ratio(slopes.max(), slopes.min())

    lin_i = fit_ols(np.hstack([X, inter]), y)
    if lin_i is not None:
        out["ela_meta.lin_w_interact.adj_r2"] = lin_i[1]

    quad = fit_ols(np.hstack([X, X ** 2]), y)
    if quad is not None:
        coef, adj = quad
        q = np.abs(coef[1 + p:])
        out["ela_meta.quad_simple.adj_r2"] = adj
        out["ela_meta.quad_simple.cond"] = ratio(q.max(), q.min())

    quad_i = fit_ols(np.hstack([X, X ** 2, inter]), y)
    if quad_i is not None:
        out["ela_meta.quad_w_interact.adj_r2"] = quad_i[1]
    return out
