"""Slow, loop-based reference implementations used only by the tests.

Nothing here imports the package's numeric code paths.
"""

import math
import statistics


def quantile_linear(values, q):
    s = sorted(values)
    pos = q * (len(s) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (pos - lo) * (s[hi] - s[lo])


def pairwise(points):
    out = []
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            out.append(math.dist(points[i], points[j]))
    return out


def dispersion(X, y, quantiles=(0.02, 0.05, 0.10, 0.25)):
    X = [list(map(float, r)) for r in X]
    y = [float(v) for v in y]
    full = pairwise(X)
    f_mean, f_med = sum(full) / len(full), statistics.median(full)
    out = {}
    for q in quantiles:
        t = f"{int(round(q * 100)):02d}"
        thr = quantile_linear(y, q)
        sub_pts = [X[i] for i in range(len(y)) if y[i] <= thr]
        if len(sub_pts) < 2:
            for k in ("ratio_mean", "ratio_median", "diff_mean", "diff_median"):
                out[f"disp.{k}_{t}"] = None
            continue
        sub = pairwise(sub_pts)
        s_mean, s_med = sum(sub) / len(sub), statistics.median(sub)
        out[f"disp.ratio_mean_{t}"] = s_mean / f_mean
        out[f"disp.ratio_median_{t}"] = s_med / f_med
        out[f"disp.diff_mean_{t}"] = s_mean - f_mean
        out[f"disp.diff_median_{t}"] = s_med - f_med
    return out


def _sd(v):
    return statistics.stdev(v) if len(v) > 1 else None


def _cor(a, b):
    ma, mb = sum(a) / len(a), sum(b) / len(b)
    sab = sum((x - ma) * (z - mb) for x, z in zip(a, b))
    saa = sum((x - ma) ** 2 for x in a)
    sbb = sum((z - mb) ** 2 for z in b)
    if saa == 0 or sbb == 0:
        return None
    return sab / math.sqrt(saa * sbb)


def nbc(X, y):
    n = len(y)
    X = [list(map(float, r)) for r in X]
    nn, nb, nb_of = [], [], [None] * n
    for i in range(n):
        nn.append(min(math.dist(X[i], X[j]) for j in range(n) if j != i))
        best_d, best_j = math.inf, None
        for j in range(n):
            if y[j] < y[i]:
                d = math.dist(X[i], X[j])
                if d < best_d:
                    best_d, best_j = d, j
        nb.append(best_d)
        nb_of[i] = best_j
    idx = [i for i in range(n) if nb_of[i] is not None]
    nn_b = [nn[i] for i in idx]
    nb_b = [nb[i] for i in idx]
    indeg = [0] * n
    for i in idx:
        indeg[nb_of[i]] += 1
    sd_nn, sd_nb = _sd(nn_b), _sd(nb_b)
    # a duplicate of a better point makes its ratio 0/0; the statistic is then undefined
    if any(b == 0 for b in nb_b):
        sd_r, mean_r = None, None
    else:
        ratios = [a / b for a, b in zip(nn_b, nb_b)]
        sd_r = _sd(ratios)
        mean_r = sum(ratios) / len(ratios)
    return {
        "nbc.nn_nb.sd_ratio": None if not sd_nb else sd_nn / sd_nb,
        "nbc.nn_nb.mean_ratio": (sum(nn_b) / len(nn_b)) / (sum(nb_b) / len(nb_b)),
        "nbc.nn_nb.cor": _cor(nn_b, nb_b),
        "nbc.dist_ratio.coeff_var": None if sd_r is None or not mean_r else sd_r / mean_r,
        "nbc.nb_fitness.cor": _cor(list(y), indeg),
    }


def target_encoding_value(y_norm, mask):
    """Smoothed category value for the rows flagged in ``mask``."""
    n = len(y_norm)
    yj = [v for v, m in zip(y_norm, mask) if m]
    nj = len(yj)
    mean_j = sum(yj) / nj
    mean = sum(y_norm) / n
    var_j = sum((v - mean_j) ** 2 for v in yj) / nj
    var = sum((v - mean) ** 2 for v in y_norm) / n
    lam = 1.0 if var == 0 else nj / (nj + var_j / var)
    return lam * mean_j + (1 - lam) * mean


def _sse(rows):
    d = len(rows[0])
    mean = [sum(r[j] for r in rows) / len(rows) for j in range(d)]
    return sum(sum((r[j] - mean[j]) ** 2 for j in range(d)) for r in rows)


def ward_heights(X):
    """Naive agglomeration by least increase of within-cluster squared error.

    Returns merge heights on the same scale as scipy's ward linkage,
    sqrt(2 * increase).
    """
    clusters = [[list(map(float, r))] for r in X]
    heights = []
    while len(clusters) > 1:
        best = None
        for a in range(len(clusters)):
            for b in range(a + 1, len(clusters)):
                inc = _sse(clusters[a] + clusters[b]) - _sse(clusters[a]) - _sse(clusters[b])
                if best is None or inc < best[0]:
                    best = (inc, a, b)
        inc, a, b = best
        merged = clusters[a] + clusters[b]
        clusters = [c for i, c in enumerate(clusters) if i not in (a, b)] + [merged]
        heights.append(math.sqrt(2 * max(inc, 0.0)))
    return heights


def best_two_partition(X):
    """Exhaustive minimum-SSE split of the rows into two nonempty groups."""
    n = len(X)
    best = None
    for mask in range(1, 2 ** (n - 1)):
        g1 = [X[i] for i in range(n) if mask >> i & 1]
        g0 = [X[i] for i in range(n) if not mask >> i & 1]
        cost = _sse(g0) + _sse(g1)
        if best is None or cost < best[0]:
            best = (cost, [mask >> i & 1 for i in range(n)])
    return best[1]
