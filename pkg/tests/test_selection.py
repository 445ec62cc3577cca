import numpy as np
import pytest

from mixela.performance import PerfRecord, portfolio_summary
from mixela.selection import (
    AASDataset,
    ForestConfig,
    ForestModel,
    cross_validate,
    evaluate_selector,
    fold_masks,
    greedy_select,
    grouped_kfold,
    rf_fit,
    rf_predict,
    vote_per_instance,
    write_dataset,
)

FAST = ForestConfig(n_trees=15, seed=0)


def dataset(X, labels, reps=1):
    """Rows ``r*reps .. r*reps+reps-1`` share instance ``r``."""
    n = len(labels)
    inst = [f"p{i // reps:03d}" for i in range(n)]
    return AASDataset(inst, [i % reps for i in range(n)], X, labels, [f"f{j}" for j in range(X.shape[1])])


def threshold_data(seed, n_inst=30, reps=3, p=5, signal=3):
    rng = np.random.default_rng(seed)
    centre = rng.uniform(size=(n_inst, p))
    X = np.repeat(centre, reps, axis=0) + rng.normal(0, 0.01, size=(n_inst * reps, p))
    lab = np.where(np.repeat(centre[:, signal], reps) > 0.5, "B", "A")
    return dataset(X, lab, reps)


class TestFolds:
    def test_leave_one_out(self):
        folds = grouped_kfold([f"i{j}" for j in range(10)], 10, 0)
        assert sorted(len(f) for f in folds) == [1] * 10

    def test_partition_and_determinism(self):
        ids = [f"i{j}" for j in range(23) for _ in range(4)]
        a, b = grouped_kfold(ids, 5, 1), grouped_kfold(ids, 5, 1)
        assert a == b
        flat = [i for f in a for i in f]
        assert sorted(flat) == sorted(set(ids))
        assert max(map(len, a)) - min(map(len, a)) <= 1

    @pytest.mark.parametrize("k", [1, 6])
    def test_invalid_k(self, k):
        with pytest.raises(ValueError):
            grouped_kfold(list("abcde"), k, 0)

    def test_no_leakage(self):
        data = threshold_data(0, n_inst=35, reps=20)
        folds = grouped_kfold(data.instance_ids, 10, 0)
        for train, test in fold_masks(data, folds):
            assert not set(data.instance_ids[train]) & set(data.instance_ids[test])
            for inst in set(data.instance_ids[test]):
                assert test[data.instance_ids == inst].all()


class TestForest:
    def test_blobs(self):
        rng = np.random.default_rng(0)
        X = np.vstack([rng.normal(0, 1, (100, 2)), rng.normal(0, 1, (100, 2)) + [5, 0]])
        lab = np.array(["A"] * 100 + ["B"] * 100)
        data = dataset(X, lab)
        acc, _ = cross_validate(data, [0, 1], grouped_kfold(data.instance_ids, 5, 0), ForestConfig())
        assert acc >= 0.95

    def test_single_class(self):
        data = dataset(np.random.default_rng(1).uniform(size=(10, 3)), ["Z"] * 10)
        model = rf_fit(data, [0, 1, 2], FAST)
        assert set(rf_predict(model, np.random.default_rng(2).uniform(size=(5, 3)))) == {"Z"}

    def test_determinism_and_class_set(self):
        data = threshold_data(1)
        probe = np.random.default_rng(3).uniform(size=(40, 5))
        a = rf_predict(rf_fit(data, [0, 3], FAST), probe)
        b = rf_predict(rf_fit(data, [0, 3], FAST), probe)
        assert a.tolist() == b.tolist() and set(a) <= {"A", "B"}

    def test_missing_values_use_training_median(self):
        data = threshold_data(2)
        data.X[::4, 3] = np.nan
        model = rf_fit(data, [3], FAST)
        assert np.isfinite(model.medians).all()
        assert rf_predict(model, [[0, 0, 0, np.nan, 0]])[0] in {"A", "B"}

    def test_tie_goes_to_smallest_label(self):
        class Stub:
            def __init__(self, k):
                self.k = k

            def predict(self, M):
                return np.full(len(M), self.k)

        classes = np.array(["a", "b"], dtype=object)
        model = ForestModel([Stub(1), Stub(0)], classes, FAST, [0], np.zeros(1), np.array([0, 1]))
        assert rf_predict(model, [[0.0]])[0] == "a"

    def test_empty(self):
        with pytest.raises(ValueError):
            rf_fit(dataset(np.zeros((0, 2)), []), [0], FAST)


class TestGreedy:
    def test_finds_signal_first(self):
        res = greedy_select(threshold_data(4), k=5, seed=0, config=FAST)
        assert res.indices[0] == 3
        acc = [s["accuracy"] for s in res.steps]
        assert all(b > a for a, b in zip(acc, acc[1:]))
        assert res.evaluations <= 2 * 5 * 6

    def test_null_signal(self):
        rng = np.random.default_rng(5)
        lab = np.repeat(rng.choice(["A", "B"], 30), 3)
        data = dataset(rng.uniform(size=(90, 4)), lab, reps=3)
        res = greedy_select(data, k=5, seed=0, config=FAST)
        assert len(res.indices) <= 1
        majority = max(np.mean(lab == "A"), np.mean(lab == "B"))
        assert abs(res.accuracy - majority) < 0.2

    def test_duplicate_column(self):
        data = threshold_data(6, p=5, signal=1)
        data.X[:, 4] = data.X[:, 1]
        res = greedy_select(data, k=5, seed=0, config=FAST)
        assert 1 in res.indices and 4 not in res.indices

    def test_evaluation_cap(self):
        rng = np.random.default_rng(7)
        data = dataset(rng.uniform(size=(60, 3)), np.repeat(rng.choice(["A", "B", "C"], 20), 3), reps=3)
        res = greedy_select(data, k=4, seed=1, config=ForestConfig(n_trees=5))
        assert res.evaluations <= 2 * 3 * 4


class TestEvaluate:
    recs = [PerfRecord("x", "A", 200, 1, 1, 1, 0), PerfRecord("x", "B", 50, 1, 1, 1, 0),
            PerfRecord("y", "A", 10, 1, 1, 1, 0), PerfRecord("y", "B", 400, 1, 1, 1, 0)]
    size = {"x": 150, "y": 150}

    def test_additive_cost(self):
        s = evaluate_selector({"x": "A"}, self.recs, {"x": 150})
        assert s.model_ert == 350

    def test_oracle_and_sbs(self):
        summ = portfolio_summary(self.recs)
        oracle = evaluate_selector(summ.best_per_instance, self.recs, self.size)
        sbs = evaluate_selector({"x": summ.sbs, "y": summ.sbs}, self.recs, self.size)
        assert oracle.model_ert == summ.vbs_ert + 150
        assert sbs.model_ert == summ.sbs_ert + 150
        worst = evaluate_selector({"x": "A", "y": "B"}, self.recs, self.size)
        assert oracle.model_ert <= sbs.model_ert <= worst.model_ert

    def test_unknown(self):
        with pytest.raises(KeyError):
            evaluate_selector({"x": "C"}, self.recs, self.size)
        with pytest.raises(KeyError):
            evaluate_selector({"z": "A"}, self.recs, self.size)


def test_vote_per_instance():
    got = vote_per_instance(["a", "a", "a", "b", "b"], ["Y", "X", "Y", "Y", "X"])
    assert got == {"a": "Y", "b": "X"}


def test_inconsistent_labels():
    with pytest.raises(ValueError, match="label"):
        dataset(np.zeros((2, 1)), ["A", "B"], reps=2)


def test_write_dataset(tmp_path):
    data = dataset(np.array([[1.0, np.nan]]), ["A"])
    write_dataset(data, tmp_path / "d.csv")
    assert (tmp_path / "d.csv").read_text() == "instance_id,repetition,f0,f1,label\np000,0,1.0,,A\n"
