"""Covariance, iris loading, and PCA against the dense eigendecomposition."""

import numpy as np
import pytest

from xbaropt.eigen import PiConfig
from xbaropt.errors import ParseError, TooFewSamples, WrongShape
from xbaropt.numerics import make_rng, sym_eig_oracle
from xbaropt.pca import Dataset, covariance, export_scores, load_iris, pca


def test_covariance_matches_numpy():
    rng = make_rng(0)
    X = rng.standard_normal((30, 4))
    data = Dataset(values=X)
    np.testing.assert_allclose(covariance(data), np.cov(X, rowvar=False), atol=1e-12)


def test_covariance_standardized_is_correlation():
    rng = make_rng(1)
    X = rng.standard_normal((40, 3)) * np.array([1.0, 10.0, 0.1])
    corr = covariance(Dataset(values=X), standardize=True)
    np.testing.assert_allclose(np.diag(corr), np.ones(3), atol=1e-12)


def test_covariance_needs_two_samples():
    with pytest.raises(TooFewSamples):
        covariance(Dataset(values=np.ones((1, 3))))


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(values=np.array([[np.nan, 1.0]]))
    with pytest.raises(ValueError):
        Dataset(values=np.ones((2, 2)), labels=["a"])


def test_load_iris_shape_and_labels():
    data = load_iris()
    assert data.values.shape == (150, 4)
    assert len(data.labels) == 150
    assert set(data.labels) == {"setosa", "versicolor", "virginica"}


def test_load_iris_rejects_wrong_shape(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("5.1,3.5,1.4,0.2,setosa\n4.9,3.0,1.4,0.2,setosa\n")
    with pytest.raises(WrongShape):
        load_iris(path)
    data = load_iris(path, strict_shape=False)
    assert data.values.shape == (2, 4)


def test_load_iris_parse_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0,2.0,3.0\n")
    with pytest.raises(ParseError):
        load_iris(bad)
    nonnum = tmp_path / "nonnum.csv"
    nonnum.write_text("a,b,c,d,label\n1.0,2.0,xx,0.2,setosa\n")
    with pytest.raises(ParseError):
        load_iris(nonnum, strict_shape=False)


def test_pca_matches_oracle_on_iris():
    data = load_iris()
    result = pca(data, 2, PiConfig(), rng=make_rng(2))
    vals, vecs = sym_eig_oracle(covariance(data))
    np.testing.assert_allclose(result.variances, vals[:2], rtol=1e-9)
    centered = data.values - data.values.mean(axis=0)
    for i in range(2):
        ref = centered @ vecs[:, i]
        got = result.projected[:, i]
        assert min(np.linalg.norm(got - ref), np.linalg.norm(got + ref)) < 1e-6


def test_pca_rejects_oversized_k():
    with pytest.raises(ValueError):
        pca(Dataset(values=np.ones((5, 2)) + np.eye(5, 2)), 3)


def test_export_scores_round_trip(tmp_path):
    data = load_iris()
    result = pca(data, 2, PiConfig(), rng=make_rng(3))
    out = tmp_path / "scores.csv"
    export_scores(result, data.labels, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "pc1,pc2,label"
    assert len(lines) == 151
    first = lines[1].split(",")
    assert float(first[0]) == pytest.approx(result.projected[0, 0])
    assert first[2] == data.labels[0]
