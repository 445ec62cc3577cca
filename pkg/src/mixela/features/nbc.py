"""Nearest-better clustering features."""

import numpy as np
from scipy.spatial.distance import cdist

from .common import MISSING, pearson, ratio

NBC_NAMES = [
    "nbc.nn_nb.sd_ratio",
    "nbc.nn_nb.mean_ratio",
    "nbc.nn_nb.cor",
    "nbc.dist_ratio.coeff_var",
    "nbc.nb_fitness.cor",
]


def nearest_better(X: np.ndarray, y: np.ndarray):
    """Per point: nearest-neighbour distance, nearest-better distance and index.

    Points without a strictly better point get ``nb = inf`` and index ``-1``.
    Distance ties go to the lowest index.
    """
    D = cdist(X, X)
    np.fill_diagonal(D, np.inf)
    nn = D.min(axis=1)
    better = y[None, :] < y[:, None]
    Db = np.where(better, D, np.inf)
    nb_idx = np.argmin(Db, axis=1)
    nb = Db[np.arange(len(y)), nb_idx]
    nb_idx = np.where(np.isfinite(nb), nb_idx, -1)
    return nn, nb, nb_idx


def nbc(sample) -> dict[str, float]:
    X = np.asarray(sample.matrix, dtype=float)
    y = np.asarray(sample.y, dtype=float)
    if y.size < 3:
        raise ValueError("nbc needs at least 3 observations")
    if np.all(y == y[0]):
        raise ValueError("nbc is undefined when all objective values are equal")

    nn, nb, nb_idx = nearest_better(X, y)
    has = nb_idx >= 0
    nn_b, nb_b = nn[has], nb[has]
    indegree = np.bincount(nb_idx[has], minlength=y.size)
    with np.errstate(divide="ignore", invalid="ignore"):
        dist_ratio = nn_b / nb_b
    return {
        "nbc.nn_nb.sd_ratio": ratio(np.std(nn_b, ddof=1), np.std(nb_b, ddof=1)) if nn_b.size > 1 else MISSING,
        "nbc.nn_nb.mean_ratio": ratio(nn_b.mean(), nb_b.mean()),
        "nbc.nn_nb.cor": pearson(nn_b, nb_b),
        "nbc.dist_ratio.coeff_var": (
            ratio(np.std(dist_ratio, ddof=1), dist_ratio.mean())
            if dist_ratio.size > 1 and np.all(np.isfinite(dist_ratio)) else MISSING
        ),
        "nbc.nb_fitness.cor": pearson(y, indegree),
    }
