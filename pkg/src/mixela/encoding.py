"""Turn a raw mixed design into a numeric sample in [0, 1].

Order matters: inactive entries are imputed, the objective is normalized,
categoricals are encoded (target encoding reads the *normalized* objective),
and only then is the decision space normalized.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .sampling import Design, impute_inactive
from .space import NA, SearchSpace

OH = "OH"
TE = "TE"
ENCODINGS = (OH, TE)


def check_encoding(encoding: str) -> str:
    enc = encoding.upper()
    if enc not in ENCODINGS:
        raise ValueError(f"unknown encoding {encoding!r}; expected one of {ENCODINGS}")
    return enc


@dataclass
class EncodedSample:
    matrix: np.ndarray
    y: np.ndarray
    column_names: list[str]
    encoding: str
    origin: dict[str, str] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        return self.matrix.shape[1]

    @classmethod
    def from_arrays(cls, X, y, encoding: str = TE) -> "EncodedSample":
        """Wrap a ready numeric sample (used for fixtures and external data)."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        names = [f"x{j}" for j in range(X.shape[1])]
        return cls(X, np.asarray(y, dtype=float), names, encoding, {c: c for c in names})


def encoded_columns(space: SearchSpace, encoding: str) -> tuple[list[str], list[str]]:
    """Column names and source variable id per encoded column."""
    encoding = check_encoding(encoding)
    names, origin = [], []
    for v in space.variables:
        if v.is_categorical and encoding == OH:
            for c in v.categories:
                names.append(f"{v.id}={c}")
                origin.append(v.id)
        else:
            names.append(v.id)
            origin.append(v.id)
    return names, origin


def normalize_objective(y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.size < 2:
        raise ValueError("need at least two objective values")
    if not np.all(np.isfinite(y)):
        raise ValueError("objective values must be finite")
    lo, hi = y.min(), y.max()
    if hi == lo:
        return np.full(y.shape, 0.5)
    return (y - lo) / (hi - lo)


def _numeric_column(design: Design, j: int, var_id: str) -> np.ndarray:
    col = design.column(j)
    if any(v is NA for v in col):
        raise ValueError(f"column {var_id!r} still holds NA; impute first")
    return np.array(col, dtype=float)


def _category_codes(design: Design, j: int, var) -> np.ndarray:
    lookup = {c: k for k, c in enumerate(var.categories)}
    codes = np.empty(design.n, dtype=int)
    for i, value in enumerate(design.column(j)):
        if value is NA:
            raise ValueError(f"column {var.id!r} still holds NA; impute first")
        try:
            codes[i] = lookup[value]
        except (KeyError, TypeError):
            raise ValueError(f"value {value!r} is not a declared category of {var.id!r}") from None
    return codes


def one_hot(design: Design, space: SearchSpace) -> np.ndarray:
    cols = []
    for j, v in enumerate(space.variables):
        if v.is_categorical:
            codes = _category_codes(design, j, v)
            cols.append(np.eye(len(v.categories))[codes])
        else:
            cols.append(_numeric_column(design, j, v.id)[:, None])
    return np.hstack(cols)


def smoothing_lambda(n_j: int, var_j: float, var_global: float) -> float:
    """Shrinkage weight of a category mean towards the global mean."""
    if n_j < 1:
        raise ValueError("n_j must be at least 1")
    if var_global == 0:
        return 1.0
    return n_j / (n_j + var_j / var_global)


def target_encode(design: Design, y_norm, space: SearchSpace) -> np.ndarray:
    """Replace each category by a smoothed blend of its mean and the global mean.

    Variances are population variances. Numeric columns pass through.
    """
    y_norm = np.asarray(y_norm, dtype=float)
    if y_norm.shape != (design.n,):
        raise ValueError("y_norm must have one value per design row")
    mean_all = y_norm.mean()
    var_all = y_norm.var()
    out = np.empty((design.n, space.dim))
    for j, v in enumerate(space.variables):
        if not v.is_categorical:
            out[:, j] = _numeric_column(design, j, v.id)
            continue
        codes = _category_codes(design, j, v)
        for k in np.unique(codes):
            mask = codes == k
            yj = y_norm[mask]
            lam = smoothing_lambda(int(mask.sum()), yj.var(), var_all)
            out[mask, j] = lam * yj.mean() + (1.0 - lam) * mean_all
    return out


def _minmax(col: np.ndarray) -> np.ndarray:
    lo, hi = col.min(), col.max()
    if hi == lo:
        return np.full(col.shape, 0.5)
    return (col - lo) / (hi - lo)


def normalize_decision(matrix, space: SearchSpace, encoding: str) -> np.ndarray:
    """Map every column into [0, 1].

    Numeric columns use the declared bounds, indicator columns are left as
    they are, and target-encoded columns use their sample range.
    """
    encoding = check_encoding(encoding)
    X = np.array(matrix, dtype=float)
    _, origin = encoded_columns(space, encoding)
    if X.ndim != 2 or X.shape[1] != len(origin):
        raise ValueError(f"matrix has shape {X.shape}, expected {len(origin)} columns")
    if np.isnan(X).any():
        raise ValueError("matrix contains NA")
    for c, var_id in enumerate(origin):
        v = space[var_id]
        if v.is_categorical:
            if encoding == TE:
                X[:, c] = _minmax(X[:, c])
            continue
        col = X[:, c]
        if col.min() < v.lower or col.max() > v.upper:
            raise ValueError(f"column {var_id!r} leaves its bounds [{v.lower}, {v.upper}]")
        if v.upper == v.lower:
            X[:, c] = 0.5
        else:
            X[:, c] = (col - v.lower) / (v.upper - v.lower)
    return X


def preprocess(design: Design, space: SearchSpace, encoding: str, seed: int) -> EncodedSample:
    encoding = check_encoding(encoding)
    full = impute_inactive(design, space, seed)
    y_norm = normalize_objective(full.y)
    if encoding == OH:
        raw = one_hot(full, space)
    else:
        raw = target_encode(full, y_norm, space)
    X = normalize_decision(raw, space, encoding)
    names, origin = encoded_columns(space, encoding)
    return EncodedSample(X, y_norm, names, encoding, dict(zip(names, origin)))


def write_encoded(sample: EncodedSample, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(sample.column_names + ["y"])
        for row, y in zip(sample.matrix, sample.y):
            w.writerow([repr(float(v)) for v in row] + [repr(float(y))])
