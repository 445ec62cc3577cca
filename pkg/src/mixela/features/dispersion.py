"""Spread of the best points relative to the whole sample."""

import numpy as np
from scipy.spatial.distance import pdist

from .common import MISSING

QUANTILES = (0.02, 0.05, 0.10, 0.25)


def _tag(q: float) -> str:
    return f"{int(round(q * 100)):02d}"


def dispersion_names(quantiles=QUANTILES) -> list[str]:
    names = []
    for q in quantiles:
        t = _tag(q)
        names += [f"disp.ratio_mean_{t}", f"disp.ratio_median_{t}",
                  f"disp.diff_mean_{t}", f"disp.diff_median_{t}"]
    return names


def dispersion(sample, quantiles=QUANTILES) -> dict[str, float]:
    X = np.asarray(sample.matrix, dtype=float)
    y = np.asarray(sample.y, dtype=float)
    full = pdist(X)
    full_mean, full_median = full.mean(), np.median(full)
    out = {}
    for q in quantiles:
        t = _tag(q)
        idx = np.flatnonzero(y <= np.quantile(y, q))
        if idx.size < 2:
            for key in ("ratio_mean", "ratio_median", "diff_mean", "diff_median"):
                out[f"disp.{key}_{t}"] = MISSING
            continue
        sub = pdist(X[idx])
        sub_mean, sub_median = sub.mean(), np.median(sub)
        out[f"disp.ratio_mean_{t}"] = float(sub_mean / full_mean) if full_mean > 0 else MISSING
        out[f"disp.ratio_median_{t}"] = float(sub_median / full_median) if full_median > 0 else MISSING
        out[f"disp.diff_mean_{t}"] = float(sub_mean - full_mean)
        out[f"disp.diff_median_{t}"] = float(sub_median - full_median)
    return out
