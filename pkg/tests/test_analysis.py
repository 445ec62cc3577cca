
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from mixela.analysis import (
    by_key,
    correlate,
    encoding_correlations,
    mean_per_instance,
    standardize,
    ward_cluster,
    ward_linkage,
    write_clusters,
    write_correlations,
)
from mixela.features import FeatureVector, is_missing


def same_partition(a, b):
    pairs = {}
    for x, y in zip(a, b):
        if pairs.setdefault(x, y) != y:
            return False
    return len(set(pairs.values())) == len(pairs)


class TestCorrelation:
    def test_linear(self):
        c = correlate([1, 2, 3], [2, 4, 6])
        assert c.pearson == pytest.approx(1) and c.spearman == pytest.approx(1) and c.n == 3

    def test_monotone(self):
        c = correlate([1, 2, 3], [1, 4, 9])
        assert c.spearman == pytest.approx(1) and c.pearson < 1

    def test_inverse(self):
        c = correlate([1, 2, 3, 4], [-1, -2, -3, -4])
        assert c.pearson == pytest.approx(-1) and c.spearman == pytest.approx(-1)

    def test_ties_average_ranks(self):
        # ranks of [1, 1, 2] are [1.5, 1.5, 3]
        c = correlate([1, 1, 2], [1.5, 1.5, 3])
        assert c.spearman == pytest.approx(1)

    def test_degenerate(self):
        assert is_missing(correlate([1, 2], [3, 4]).pearson)
        assert is_missing(correlate([1, 1, 1], [1, 2, 3]).pearson)
        c = correlate([1, np.nan, 2, 3], [1, 5, 2, 3])
        assert c.n == 3

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**6), st.floats(0.1, 10), st.floats(-5, 5))
    def test_invariances(self, seed, scale, shift):
        rng = np.random.default_rng(seed)
        a, b = rng.normal(size=20), rng.normal(size=20)
        c0 = correlate(a, b)
        assert correlate(scale * a + shift, b).pearson == pytest.approx(c0.pearson, abs=1e-9)
        assert correlate(np.exp(a), b ** 3).spearman == pytest.approx(c0.spearman, abs=1e-9)
        assert -1 <= c0.pearson <= 1 and -1 <= c0.spearman <= 1


def vec(inst, enc, rep, vals):
    return FeatureVector(dict(vals), inst, enc, rep)


def test_encoding_correlations_align_by_key():
    te = {("a", 0): {"f": 1.0}, ("b", 0): {"f": 2.0}, ("c", 0): {"f": 3.0}, ("d", 0): {"f": 9.0}}
    oh = {("c", 0): {"f": 30.0}, ("a", 0): {"f": 10.0}, ("b", 0): {"f": 20.0}}
    r = encoding_correlations(te, oh)
    assert r["f"].pearson == pytest.approx(1) and r["f"].n == 3
    with pytest.raises(ValueError):
        encoding_correlations(te, {("z", 0): {"f": 1.0}})


def test_mean_per_instance_skips_missing():
    vs = [vec("b", "TE", 0, {"f": 1.0, "g": np.nan}), vec("b", "TE", 1, {"f": 3.0, "g": 4.0}),
          vec("a", "TE", 0, {"f": 5.0, "g": np.nan}), vec("a", "OH", 0, {"f": 99.0, "g": 99.0})]
    inst, names, M = mean_per_instance(vs, "TE")
    assert inst == ["a", "b"] and names == ["f", "g"]
    assert M[1].tolist() == [2.0, 4.0]
    assert M[0, 0] == 5.0 and np.isnan(M[0, 1])
    assert set(by_key(vs, "OH")) == {("a", 0)}


def test_standardize():
    Z = standardize([[1.0, 5.0, np.nan], [3.0, 5.0, np.nan], [np.nan, 5.0, np.nan]])
    assert Z[:2, 0].tolist() == [-1.0, 1.0] and Z[2, 0] == 0
    assert not Z[:, 1:].any()


class TestWard:
    def blobs(self, seed, n=10):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(n, 3))
        X[n // 2:] += 10
        return X

    def test_blobs_match_exhaustive(self):
        X = self.blobs(0)
        labels = ward_cluster(X, 2)
        assert labels.tolist() == [0] * 5 + [1] * 5
        assert same_partition(labels, oracles.best_two_partition(standardize(X).tolist()))

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6), st.integers(3, 9))
    def test_heights_match_naive_agglomeration(self, seed, n):
        X = np.random.default_rng(seed).normal(size=(n, 2))
        Z = ward_linkage(X)
        np.testing.assert_allclose(Z[:, 2], oracles.ward_heights(X.tolist()), atol=1e-9)
        assert np.all(np.diff(Z[:, 2]) >= -1e-12)

    def test_extremes(self):
        X = self.blobs(1, 8)
        assert set(ward_cluster(X, 1)) == {0}
        assert ward_cluster(X, 8).tolist() == list(range(8))
        for k in (0, 9):
            with pytest.raises(ValueError):
                ward_cluster(X, k)

    def test_first_appearance_numbering(self):
        X = self.blobs(2)[::-1]
        assert ward_cluster(X, 2)[0] == 0

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(12, 3)) + np.repeat(rng.normal(0, 8, (3, 3)), 4, axis=0)
        perm = rng.permutation(12)
        a = ward_cluster(X, 3)
        b = ward_cluster(X[perm], 3)
        assert same_partition(a[perm], b)


def test_writers(tmp_path):
    write_correlations({"f": correlate([1, 2], [1, 2]), "g": correlate([1, 2, 3], [3, 2, 1])}, tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[:2] == ["feature_name,pearson,spearman,n", "f,,,2"]
    assert lines[2].startswith("g,-1.0")
    write_clusters(["a", "b"], [0, 1], tmp_path / "k.csv")
    assert (tmp_path / "k.csv").read_text() == "instance_id,cluster\na,0\nb,1\n"
