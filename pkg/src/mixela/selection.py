"""Algorithm selection as multi-class classification on landscape features.

Rows are (instance, repetition) feature vectors; every repetition of an
instance carries the instance's best algorithm as label, and all of them
always land in the same cross-validation fold.
"""

from __future__ import annotations

import csv
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from sklearn.ensemble import RandomForestClassifier

from .performance import PerfRecord, ert_lookup, gap_closure, portfolio_summary

log = logging.getLogger(__name__)

DEFAULT_FOLDS = 10
DEFAULT_TREES = 100


@dataclass
class AASDataset:
    instance_ids: np.ndarray
    repetitions: np.ndarray
    X: np.ndarray
    labels: np.ndarray
    feature_names: list[str]

    def __post_init__(self):
        self.instance_ids = np.asarray(self.instance_ids, dtype=object)
        self.repetitions = np.asarray(self.repetitions, dtype=int)
        self.X = np.asarray(self.X, dtype=float)
        self.labels = np.asarray(self.labels, dtype=object)
        n = len(self.instance_ids)
        if self.X.shape != (n, len(self.feature_names)) or len(self.labels) != n:
            raise ValueError("dataset columns disagree in length")
        seen: dict = {}
        for inst, lab in zip(self.instance_ids, self.labels):
            if seen.setdefault(inst, lab) != lab:
                raise ValueError(f"instance {inst!r} carries more than one label")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def instances(self) -> list[str]:
        return sorted(set(self.instance_ids))

    def take(self, mask) -> "AASDataset":
        return AASDataset(self.instance_ids[mask], self.repetitions[mask], self.X[mask],
                          self.labels[mask], list(self.feature_names))

    @classmethod
    def from_vectors(cls, vectors, labels: Mapping[str, str], feature_names: Sequence[str] | None = None):
        vectors = list(vectors)
        names = list(feature_names or vectors[0].values)
        return cls(
            [v.instance_id for v in vectors],
            [v.repetition for v in vectors],
            np.array([[v.values[k] for k in names] for v in vectors], dtype=float),
            [labels[v.instance_id] for v in vectors],
            names,
        )


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = DEFAULT_TREES
    seed: int = 0


@dataclass
class ForestModel:
    trees: list
    classes: np.ndarray
    config: ForestConfig
    features: list[int]
    medians: np.ndarray
    # class index of each position in the fitted trees' outputs
    tree_classes: np.ndarray | None = None

    def matrix(self, X: np.ndarray) -> np.ndarray:
        """Select the model's columns and fill missing values with training medians."""
        if not self.features:
            return np.zeros((X.shape[0], 1))
        M = np.array(X[:, self.features], dtype=float)
        bad = ~np.isfinite(M)
        M[bad] = np.broadcast_to(self.medians, M.shape)[bad]
        return M


def _training_medians(M: np.ndarray) -> np.ndarray:
    M = np.where(np.isfinite(M), M, np.nan)
    med = np.zeros(M.shape[1])
    for j in range(M.shape[1]):
        col = M[:, j][~np.isnan(M[:, j])]
        med[j] = np.median(col) if col.size else 0.0
    return med


def rf_fit(data: AASDataset, features: Sequence[int], config: ForestConfig = ForestConfig()) -> ForestModel:
    """Bootstrap forest of unpruned Gini trees with ceil(sqrt(p)) split candidates.

    An empty feature subset yields trees on a constant column, i.e. each tree
    predicts the majority class of its bootstrap sample.
    """
    if len(data) == 0:
        raise ValueError("cannot fit a forest on an empty dataset")
    features = [int(j) for j in features]
    medians = _training_medians(data.X[:, features]) if features else np.zeros(0)
    model = ForestModel([], np.array(sorted(set(data.labels)), dtype=object), config, features, medians)
    M = model.matrix(data.X)
    forest = RandomForestClassifier(
        n_estimators=config.n_trees,
        criterion="gini",
        max_features=max(1, math.ceil(math.sqrt(M.shape[1]))),
        bootstrap=True,
        min_samples_split=2,
        min_samples_leaf=1,
        random_state=config.seed,
        n_jobs=1,
    )
    forest.fit(M, np.searchsorted(model.classes, data.labels))
    model.trees = list(forest.estimators_)
    model.tree_classes = forest.classes_
    return model


def rf_predict(model: ForestModel, X) -> np.ndarray:
    """Majority vote of the trees; ties go to the lexicographically smallest class."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    M = model.matrix(X)
    votes = np.zeros((M.shape[0], len(model.classes)), dtype=int)
    rows = np.arange(M.shape[0])
    for tree in model.trees:
        pos = tree.predict(M).astype(int)
        votes[rows, model.tree_classes[pos]] += 1
    return model.classes[np.argmax(votes, axis=1)]


def grouped_kfold(instance_ids: Iterable[str], k: int, seed: int) -> list[list[str]]:
    """Shuffle the distinct instances and deal them into ``k`` near-equal folds."""
    unique = sorted(set(instance_ids))
    if not 2 <= k <= len(unique):
        raise ValueError(f"need 2 <= k <= {len(unique)} instances, got k={k}")
    rng = np.random.default_rng([int(seed), 4])
    order = rng.permutation(len(unique))
    return [[unique[i] for i in part] for part in np.array_split(order, k)]


def fold_masks(data: AASDataset, folds: list[list[str]]):
    for group in folds:
        test = np.isin(data.instance_ids, group)
        train = ~test
        leaked = set(data.instance_ids[train]) & set(data.instance_ids[test])
        assert not leaked, f"instances {sorted(leaked)} in both train and test"
        yield train, test


def cross_validate(data: AASDataset, features: Sequence[int], folds: list[list[str]],
                   config: ForestConfig = ForestConfig()) -> tuple[float, np.ndarray]:
    """Mean fold accuracy and out-of-fold predictions for one feature subset."""
    preds = np.empty(len(data), dtype=object)
    accs = []
    for train, test in fold_masks(data, folds):
        model = rf_fit(data.take(train), features, config)
        preds[test] = rf_predict(model, data.X[test])
        accs.append(float(np.mean(preds[test] == data.labels[test])))
    return float(np.mean(accs)), preds


@dataclass
class SelectionResult:
    features: list[str]
    indices: list[int]
    accuracy: float
    steps: list[dict] = field(default_factory=list)
    evaluations: int = 0


def greedy_select(data: AASDataset, k: int = DEFAULT_FOLDS, seed: int = 0,
                  config: ForestConfig | None = None) -> SelectionResult:
    """Greedy forward selection with conditional backward elimination.

    Starts from no features (scored as a majority-vote model). Each round adds
    the absent feature with the best CV accuracy if it strictly improves, then
    removes single features for as long as a removal strictly improves. Ties go
    to the lowest feature index.
    """
    config = config or ForestConfig(seed=seed)
    folds = grouped_kfold(data.instance_ids, k, seed)
    p = len(data.feature_names)
    budget = 2 * p * (p + 1)
    cache: dict[frozenset, float] = {}

    def score(subset) -> float:
        key = frozenset(subset)
        if key not in cache:
            cache[key] = cross_validate(data, sorted(key), folds, config)[0]
        return cache[key]

    current: list[int] = []
    best = score(current)
    steps: list[dict] = [{"action": "start", "feature": None, "accuracy": best}]
    while len(cache) < budget:
        cand, cand_score = None, best
        for j in range(p):
            if j in current or len(cache) >= budget:
                continue
            s = score(current + [j])
            if s > cand_score:
                cand, cand_score = j, s
        if cand is None:
            break
        current.append(cand)
        best = cand_score
        steps.append({"action": "add", "feature": data.feature_names[cand], "accuracy": best})
        log.info("added %s -> %.4f", data.feature_names[cand], best)

        while len(current) > 1 and len(cache) < budget:
            drop, drop_score = None, best
            for j in sorted(current):
                s = score([c for c in current if c != j])
                if s > drop_score:
                    drop, drop_score = j, s
            if drop is None:
                break
            current.remove(drop)
            best = drop_score
            steps.append({"action": "remove", "feature": data.feature_names[drop], "accuracy": best})
            log.info("removed %s -> %.4f", data.feature_names[drop], best)

    return SelectionResult([data.feature_names[j] for j in current], list(current), best, steps, len(cache))


@dataclass
class SelectorScore:
    model_ert: float
    per_instance: dict[str, float]


def evaluate_selector(predictions: Mapping[str, str], perf, design_size: Mapping[str, float]) -> SelectorScore:
    """Mean over instances of ERT(predicted algorithm) plus the sampling cost."""
    table = perf if isinstance(perf, Mapping) else ert_lookup(perf)
    if not predictions:
        raise ValueError("no predictions to evaluate")
    per = {}
    for inst, alg in predictions.items():
        if (inst, alg) not in table:
            raise KeyError(f"no performance record for instance {inst!r}, algorithm {alg!r}")
        if inst not in design_size:
            raise KeyError(f"no design size for instance {inst!r}")
        per[inst] = float(table[inst, alg]) + float(design_size[inst])
    return SelectorScore(float(np.mean(list(per.values()))), per)


def vote_per_instance(instance_ids, predictions) -> dict[str, str]:
    """Collapse per-repetition predictions to one algorithm per instance."""
    counts: dict[str, Counter] = {}
    for inst, pred in zip(instance_ids, predictions):
        counts.setdefault(inst, Counter())[pred] += 1
    out = {}
    for inst in sorted(counts):
        c = counts[inst]
        top = max(c.values())
        out[inst] = min(a for a, v in c.items() if v == top)
    return out


def run_selection(vectors, records: list[PerfRecord], folds: int = DEFAULT_FOLDS, seed: int = 0,
                  sample_factor: float = 50, n_trees: int = DEFAULT_TREES) -> dict:
    """Whole selection study: labels, feature selection, CV predictions, ERT scoring."""
    vectors = list(vectors)
    if not vectors:
        raise ValueError("no feature vectors")
    feat_instances = sorted({v.instance_id for v in vectors})
    perf_instances = {r.instance_id for r in records}
    unknown = [i for i in feat_instances if i not in perf_instances]
    if unknown:
        raise KeyError(f"instances without performance data: {unknown[:5]}")
    records = [r for r in records if r.instance_id in set(feat_instances)]
    summary = portfolio_summary(records)
    gap_closure(summary.sbs_ert, summary.vbs_ert, summary.vbs_ert)

    data = AASDataset.from_vectors(vectors, summary.best_per_instance)
    config = ForestConfig(n_trees=n_trees, seed=seed)
    selected = greedy_select(data, folds, seed, config)
    fold_groups = grouped_kfold(data.instance_ids, folds, seed)
    accuracy, oof = cross_validate(data, selected.indices, fold_groups, config)
    predictions = vote_per_instance(data.instance_ids, oof)

    dim = {}
    for v in vectors:
        dim.setdefault(v.instance_id, v.values["dimension"])
    design_size = {i: sample_factor * d for i, d in dim.items()}
    score = evaluate_selector(predictions, records, design_size)
    return {
        "encoding": sorted({v.encoding for v in vectors}),
        "features": selected.features,
        "steps": selected.steps,
        "step_accuracies": [s["accuracy"] for s in selected.steps],
        "cv_accuracy": accuracy,
        "folds": fold_groups,
        "predictions": predictions,
        "labels": summary.best_per_instance,
        "model_ert": score.model_ert,
        "sbs": summary.sbs,
        "sbs_ert": summary.sbs_ert,
        "vbs_ert": summary.vbs_ert,
        "gap_closure": gap_closure(summary.sbs_ert, summary.vbs_ert, score.model_ert),
        "evaluations": selected.evaluations,
    }


def write_dataset(data: AASDataset, path) -> None:
    """Wide CSV: instance_id, repetition, one column per feature, label."""
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["instance_id", "repetition"] + list(data.feature_names) + ["label"])
        for inst, rep, row, lab in zip(data.instance_ids, data.repetitions, data.X, data.labels):
            w.writerow([inst, rep] + ["" if not np.isfinite(v) else repr(float(v)) for v in row] + [lab])
