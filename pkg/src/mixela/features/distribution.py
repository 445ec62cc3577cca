"""Shape of the objective value distribution."""

import numpy as np

from .common import MISSING

KDE_GRID = 512
PEAK_THRESHOLD = 0.1


def silverman_bandwidth(y: np.ndarray) -> float:
    """Robust rule-of-thumb bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5)."""
    sd = y.std(ddof=1)
    q75, q25 = np.percentile(y, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34)
    if spread <= 0:
        spread = sd
    return 0.9 * spread * y.size ** -0.2


def kde_on_grid(y: np.ndarray, grid: np.ndarray, bw: float) -> np.ndarray:
    z = (grid[:, None] - y[None, :]) / bw
    return np.exp(-0.5 * z * z).sum(axis=1) / (y.size * bw * np.sqrt(2 * np.pi))


def number_of_peaks(y) -> int:
    """Count modes of a Gaussian KDE of ``y`` above 10% of the highest mode.

    Grid endpoints can be modes; a flat top counts once.
    """
    y = np.asarray(y, dtype=float)
    if y.max() == y.min():
        return 1
    grid = np.linspace(y.min(), y.max(), KDE_GRID)
    dens = kde_on_grid(y, grid, silverman_bandwidth(y))
    padded = np.concatenate([[-np.inf], dens, [-np.inf]])
    mid = padded[1:-1]
    is_peak = (mid > padded[:-2]) & (mid >= padded[2:])
    return int(np.sum(is_peak & (mid > PEAK_THRESHOLD * dens.max())))


def ela_distr(sample) -> dict[str, float]:
    y = np.asarray(sample.y, dtype=float)
    if y.size < 4:
        raise ValueError("ela_distr needs at least 4 observations")
    d = y - y.mean()
    m2 = np.mean(d ** 2)
    if m2 == 0:
        skew = kurt = MISSING
    else:
        skew = float(np.mean(d ** 3) / m2 ** 1.5)
        kurt = float(np.mean(d ** 4) / m2 ** 2 - 3.0)
    return {
        "ela_distr.skewness": skew,
        "ela_distr.kurtosis": kurt,
        "ela_distr.number_of_peaks": float(number_of_peaks(y)),
    }
