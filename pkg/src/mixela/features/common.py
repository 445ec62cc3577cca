import numpy as np

# Reserved value for features that are mathematically undefined on a sample.
# Written to CSV as an empty field.
MISSING = float("nan")


def is_missing(value) -> bool:
    return value != value


def ratio(num: float, den: float) -> float:
    if den == 0 or not np.isfinite(den) or not np.isfinite(num):
        return MISSING
    return float(num / den)


def pearson(a, b) -> float:
    """Pearson correlation, MISSING when either series is constant."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2:
        return MISSING
    da = a - a.mean()
    db = b - b.mean()
    den = np.sqrt(np.dot(da, da) * np.dot(db, db))
    if den == 0:
        return MISSING
    return float(np.clip(np.dot(da, db) / den, -1.0, 1.0))
