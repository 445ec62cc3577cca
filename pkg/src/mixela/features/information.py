"""Information content of a nearest-neighbour walk through the sample."""

import numpy as np
from scipy.spatial.distance import cdist

from ..sampling import rng_for
from .common import MISSING

EPSILONS = np.concatenate([[0.0], np.logspace(-5, 15, 1000)])
SETTLING_THRESHOLD = 0.05
PARTIAL_INFO_FRACTION = 0.5

IC_STREAM = 2

IC_NAMES = ["ic.h_max", "ic.eps_s", "ic.eps_max", "ic.eps_ratio", "ic.m0"]

# codes 3*(a+1) + (b+1) of symbol pairs (a, b) with a != b
_MIXED_PAIR_CODES = (1, 2, 3, 5, 6, 7)


def nearest_neighbor_tour(X: np.ndarray, start: int) -> np.ndarray:
    """Greedy tour: always step to the closest unvisited point (lowest index on ties)."""
    n = X.shape[0]
    D = cdist(X, X)
    visited = np.zeros(n, dtype=bool)
    order = np.empty(n, dtype=int)
    cur = start
    for t in range(n):
        order[t] = cur
        visited[cur] = True
        if t == n - 1:
            break
        d = np.where(visited, np.inf, D[cur])
        cur = int(np.argmin(d))
    return order


def symbol_sequences(X_tour: np.ndarray, y_tour: np.ndarray, epsilons=EPSILONS) -> np.ndarray:
    """Symbols in {-1, 0, 1} per epsilon (rows) and walk step (columns).

    Steps between coinciding points carry no slope and are dropped.
    """
    dist = np.linalg.norm(np.diff(X_tour, axis=0), axis=1)
    keep = dist > 0
    rate = np.diff(y_tour)[keep] / dist[keep]
    eps = np.asarray(epsilons, dtype=float)[:, None]
    return np.where(np.abs(rate)[None, :] > eps, np.sign(rate)[None, :], 0.0).astype(np.int8)


def entropy_curve(S: np.ndarray) -> np.ndarray:
    """H(eps): entropy (base 6) of consecutive unequal symbol pairs."""
    n_pairs = S.shape[1] - 1
    if n_pairs < 1:
        return np.zeros(S.shape[0])
    code = 3 * (S[:, :-1] + 1) + (S[:, 1:] + 1)
    H = np.zeros(S.shape[0])
    for c in _MIXED_PAIR_CODES:
        p = (code == c).sum(axis=1) / n_pairs
        with np.errstate(divide="ignore", invalid="ignore"):
            H -= np.where(p > 0, p * np.log(p) / np.log(6), 0.0)
    return H


def partial_information_curve(S: np.ndarray) -> np.ndarray:
    """M(eps): sign changes of the zero-free symbol sequence over the step count."""
    E, m = S.shape
    if m == 0:
        return np.zeros(E)
    pos = np.where(S != 0, np.arange(m)[None, :], -1)
    last = np.maximum.accumulate(pos, axis=1)
    prev = np.concatenate([np.full((E, 1), -1), last[:, :-1]], axis=1)
    prev_sym = np.take_along_axis(S, np.maximum(prev, 0), axis=1)
    change = (S != 0) & (prev >= 0) & (S != prev_sym)
    return change.sum(axis=1) / m


def _log_eps(eps: float) -> float:
    # eps = 0 has no logarithm; report the smallest positive grid value instead
    return float(np.log10(eps if eps > 0 else EPSILONS[1]))


def ic_from_walk(X_tour, y_tour) -> dict[str, float]:
    X_tour = np.asarray(X_tour, dtype=float)
    y_tour = np.asarray(y_tour, dtype=float)
    S = symbol_sequences(X_tour, y_tour)
    if S.shape[1] == 0:
        return dict.fromkeys(IC_NAMES, MISSING)
    H = entropy_curve(S)
    M = partial_information_curve(S)

    settled = np.flatnonzero(H < SETTLING_THRESHOLD)
    halved = np.flatnonzero(M <= PARTIAL_INFO_FRACTION * M[0])
    return {
        "ic.h_max": float(H.max()),
        "ic.eps_s": _log_eps(EPSILONS[settled[0]]) if settled.size else MISSING,
        "ic.eps_max": _log_eps(EPSILONS[int(np.argmax(H))]),
        "ic.eps_ratio": _log_eps(EPSILONS[halved[0]]) if halved.size else MISSING,
        "ic.m0": float(M[0]),
    }


def information_content(sample, seed: int) -> dict[str, float]:
    X = np.asarray(sample.matrix, dtype=float)
    y = np.asarray(sample.y, dtype=float)
    if X.shape[0] < 3:
        raise ValueError("information content needs at least 3 observations")
    rng = rng_for(seed, IC_STREAM)
    order = nearest_neighbor_tour(X, int(rng.integers(X.shape[0])))
    return ic_from_walk(X[order], y[order])
