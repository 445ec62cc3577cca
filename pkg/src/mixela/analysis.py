"""Comparisons between encodings and clustering of instances by their features."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
from scipy.cluster.hierarchy import linkage
from scipy.stats import rankdata

from .features.common import MISSING, is_missing, pearson


@dataclass
class Correlation:
    pearson: float
    spearman: float
    n: int


def spearman(a, b) -> float:
    """Pearson correlation of average ranks."""
    return pearson(rankdata(a), rankdata(b))


def correlate(a, b) -> Correlation:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ok = np.isfinite(a) & np.isfinite(b)
    a, b = a[ok], b[ok]
    if a.size < 3:
        return Correlation(MISSING, MISSING, int(a.size))
    return Correlation(pearson(a, b), spearman(a, b), int(a.size))


def encoding_correlations(features_te: Mapping[tuple, Mapping[str, float]],
                          features_oh: Mapping[tuple, Mapping[str, float]]) -> dict[str, Correlation]:
    """Per-feature correlation between TE and OH values over matched keys.

    Both inputs map an ``(instance_id, repetition)`` key to a feature dict.
    """
    keys = sorted(set(features_te) & set(features_oh))
    if not keys:
        raise ValueError("no (instance, repetition) keys shared by both encodings")
    names = list(next(iter(features_te.values())))
    report = {}
    for name in names:
        a = [features_te[k][name] for k in keys]
        b = [features_oh[k][name] for k in keys]
        report[name] = correlate(a, b)
    return report


def by_key(vectors: Iterable, encoding: str) -> dict[tuple, dict[str, float]]:
    return {(v.instance_id, v.repetition): v.values for v in vectors if v.encoding == encoding}


def mean_per_instance(vectors: Iterable, encoding: str) -> tuple[list[str], list[str], np.ndarray]:
    """Average the repetitions of each instance (missing values skipped)."""
    groups: dict[str, list] = {}
    names = None
    for v in vectors:
        if v.encoding != encoding:
            continue
        names = names or list(v.values)
        groups.setdefault(v.instance_id, []).append([v.values[k] for k in names])
    if not groups:
        raise ValueError(f"no feature vectors with encoding {encoding}")
    instances = sorted(groups)
    rows = []
    for inst in instances:
        block = np.array(groups[inst], dtype=float)
        with np.errstate(all="ignore"):
            finite = np.where(np.isfinite(block), block, np.nan)
            counts = np.sum(~np.isnan(finite), axis=0)
            sums = np.nansum(finite, axis=0)
            rows.append(np.where(counts > 0, sums / np.maximum(counts, 1), np.nan))
    return instances, names, np.vstack(rows)


def standardize(M) -> np.ndarray:
    """Column z-scores; constant or entirely missing columns become 0, gaps the column mean."""
    M = np.array(M, dtype=float)
    M[~np.isfinite(M)] = np.nan
    out = np.zeros_like(M)
    for j in range(M.shape[1]):
        col = M[:, j]
        ok = ~np.isnan(col)
        if not ok.any():
            continue
        mu, sd = col[ok].mean(), col[ok].std()
        if sd > 0:
            out[ok, j] = (col[ok] - mu) / sd
    return out


def ward_linkage(M) -> np.ndarray:
    """Ward merge table (scipy layout) of already standardized rows."""
    return linkage(np.asarray(M, dtype=float), method="ward", metric="euclidean")


def cut_linkage(Z: np.ndarray, n: int, k: int) -> np.ndarray:
    """Replay the first ``n - k`` merges and number clusters by first appearance."""
    parent = list(range(2 * n - 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for step in range(n - k):
        a, b = int(Z[step, 0]), int(Z[step, 1])
        new = n + step
        parent[find(a)] = new
        parent[find(b)] = new
    labels, seen = np.empty(n, dtype=int), {}
    for i in range(n):
        labels[i] = seen.setdefault(find(i), len(seen))
    return labels


def ward_cluster(feature_matrix, k: int, standardized: bool = False) -> np.ndarray:
    """Ward agglomerative clustering into ``k`` groups.

    Rows are z-scored per column first unless ``standardized`` is set.
    """
    M = np.asarray(feature_matrix, dtype=float)
    n = M.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if n == 1:
        return np.zeros(1, dtype=int)
    Z = ward_linkage(M if standardized else standardize(M))
    return cut_linkage(Z, n, k)


# --- CSV ----------------------------------------------------------------

def _fmt(v: float) -> str:
    return "" if is_missing(v) else repr(float(v))


def write_correlations(report: Mapping[str, Correlation], path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature_name", "pearson", "spearman", "n"])
        for name, c in report.items():
            w.writerow([name, _fmt(c.pearson), _fmt(c.spearman), c.n])


def write_clusters(instances, labels, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance_id", "cluster"])
        for inst, lab in zip(instances, labels):
            w.writerow([inst, int(lab)])
