"""Landscape features for mixed-variable problems and algorithm selection on top of them."""

from .encoding import OH, TE, EncodedSample, preprocess
from .features import FEATURE_NAMES, FeatureVector, featurize
from .problems import get_problem
from .sampling import Design, impute_inactive, sample_design
from .space import NA, Condition, Problem, SearchSpace, VariableSpec, evaluate, validate_space

__version__ = "0.1.0"
