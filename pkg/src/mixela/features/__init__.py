from .common import MISSING, is_missing
from .core import (
    FEATURE_NAMES,
    FeatureVector,
    featurize,
    features_of_design,
    landscape_features,
    read_features,
    write_features,
)
from .dispersion import dispersion
from .distribution import ela_distr, number_of_peaks
from .information import information_content
from .meta import ela_meta
from .nbc import nbc

__all__ = [
    "FEATURE_NAMES",
    "FeatureVector",
    "MISSING",
    "dispersion",
    "ela_distr",
    "ela_meta",
    "featurize",
    "features_of_design",
    "information_content",
    "is_missing",
    "landscape_features",
    "nbc",
    "number_of_peaks",
    "read_features",
    "write_features",
]
