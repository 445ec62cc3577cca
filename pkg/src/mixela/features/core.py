"""The 40-feature vector and the sample -> encode -> featurize pipeline."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..encoding import EncodedSample, check_encoding, preprocess
from ..sampling import DEFAULT_SAMPLE_FACTOR, Design, sample_design
from ..space import Problem, SearchSpace
from .common import MISSING, is_missing
from .dispersion import dispersion, dispersion_names
from .distribution import ela_distr
from .information import IC_NAMES, information_content
from .meta import META_NAMES, ela_meta
from .nbc import NBC_NAMES, nbc

DISTR_NAMES = ["ela_distr.skewness", "ela_distr.kurtosis", "ela_distr.number_of_peaks"]
META_FEATURE_NAMES = ["cat_proportion", "dimension"]

FEATURE_NAMES: list[str] = (
    DISTR_NAMES + META_NAMES + dispersion_names() + IC_NAMES + NBC_NAMES + META_FEATURE_NAMES
)

FEATURES_CSV_HEADER = ["instance_id", "encoding", "repetition", "feature_name", "value"]


@dataclass
class FeatureVector:
    values: dict[str, float]
    instance_id: str
    encoding: str
    repetition: int = 0
    cost: int = 0

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def as_array(self) -> np.ndarray:
        return np.array([self.values[k] for k in FEATURE_NAMES])


def landscape_features(sample: EncodedSample, seed: int) -> dict[str, float]:
    """All 38 landscape features of an encoded sample, in schema order.

    NBC features become MISSING when every objective value is equal.
    """
    values: dict[str, float] = {}
    values.update(ela_distr(sample))
    values.update(ela_meta(sample))
    values.update(dispersion(sample))
    values.update(information_content(sample, seed))
    try:
        values.update(nbc(sample))
    except ValueError:
        if not np.all(sample.y == sample.y[0]):
            raise
        values.update(dict.fromkeys(NBC_NAMES, MISSING))
    return values


def features_of_design(
    design: Design, space: SearchSpace, encoding: str, seed: int,
    instance_id: str = "", repetition: int = 0,
) -> FeatureVector:
    """Features of an already evaluated design (e.g. from an external problem)."""
    encoding = check_encoding(encoding)
    sample = preprocess(design, space, encoding, seed)
    values = landscape_features(sample, seed)
    values["cat_proportion"] = space.n_categorical / space.dim
    values["dimension"] = float(space.dim)
    ordered = {k: values[k] for k in FEATURE_NAMES}
    return FeatureVector(ordered, instance_id or space.name, encoding, repetition, design.n)


def featurize(
    problem: Problem, encoding: str, n: int | None = None, seed: int = 0, repetition: int = 0,
) -> FeatureVector:
    """Sample ``n`` points (default 50 * D), preprocess and compute all 40 features."""
    if n is None:
        n = DEFAULT_SAMPLE_FACTOR * problem.space.dim
    design = sample_design(problem, n, seed)
    return features_of_design(design, problem.space, encoding, seed, problem.instance_id, repetition)


# --- long-format CSV ----------------------------------------------------

def format_feature(value: float) -> str:
    return "" if is_missing(value) else repr(float(value))


def write_features(vectors, path_or_file) -> None:
    own = not hasattr(path_or_file, "write")
    fh = open(Path(path_or_file), "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FEATURES_CSV_HEADER)
        for fv in vectors:
            for name in FEATURE_NAMES:
                w.writerow([fv.instance_id, fv.encoding, fv.repetition, name, format_feature(fv.values[name])])
    finally:
        if own:
            fh.close()


def read_features(path) -> list[FeatureVector]:
    """Parse a long-format features CSV back into vectors (file order kept)."""
    vectors: dict[tuple, dict[str, float]] = {}
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != FEATURES_CSV_HEADER:
            raise ValueError(f"{path}: expected header {FEATURES_CSV_HEADER}, got {header}")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 fields, got {len(rec)}")
            inst, enc, rep, name, value = rec
            try:
                key = (inst, check_encoding(enc), int(rep))
                vectors.setdefault(key, {})[name] = MISSING if value == "" else float(value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    out = []
    for (inst, enc, rep), values in vectors.items():
        missing = [k for k in FEATURE_NAMES if k not in values]
        if missing:
            raise ValueError(f"{path}: {inst}/{enc}/{rep} lacks features {missing[:3]}...")
        out.append(FeatureVector({k: values[k] for k in FEATURE_NAMES}, inst, enc, rep))
    return out
