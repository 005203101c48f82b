"""PCA via the crossbar-backed power-iteration eigensolver.

Centers the data, forms the sample covariance (1/(m-1) normalization),
and extracts the top components through :func:`xbaropt.eigen.top_k_eigen`.
Ships the classic 150x4 iris measurements as a checked-in CSV.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .eigen import PiConfig, top_k_eigen
from .errors import ParseError, TooFewSamples, WrongShape


@dataclass(frozen=True)
class Dataset:
    values: np.ndarray
    labels: list[str] | None = None

    def __post_init__(self):
        if not np.isfinite(self.values).all():
            raise ValueError("dataset contains non-finite values")
        if self.labels is not None and len(self.labels) != self.values.shape[0]:
            raise ValueError("labels length must match sample count")

    @property
    def samples(self) -> int:
        return self.values.shape[0]

    @property
    def features(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class PcaResult:
    components: np.ndarray  # f x k, orthonormal columns
    variances: np.ndarray  # k, descending
    projected: np.ndarray  # m x k scores


def covariance(data: Dataset, standardize: bool = False):
    """Column-centered sample covariance (1/(m-1)); optionally the
    correlation matrix when ``standardize`` is set."""
    if data.samples < 2:
        raise TooFewSamples(f"need at least 2 samples, got {data.samples}")
    X = data.values - data.values.mean(axis=0)
    if standardize:
        std = X.std(axis=0, ddof=1)
        std[std == 0] = 1.0
        X = X / std
    return (X.T @ X) / (data.samples - 1)


def pca(data: Dataset, k: int, cfg: PiConfig | None = None, variation: float = 0.0,
        rng=None, standardize: bool = False) -> PcaResult:
    """Top-k principal components via power iteration on the covariance."""
    if k > data.features:
        raise ValueError(f"k={k} exceeds feature count {data.features}")
    cfg = cfg or PiConfig()
    cov = covariance(data, standardize=standardize)
    pairs = top_k_eigen(cov, k, cfg, variation=variation, rng=rng)
    components = np.column_stack([u for _, u in pairs])
    variances = np.array([lam for lam, _ in pairs])
    centered = data.values - data.values.mean(axis=0)
    if standardize:
        std = centered.std(axis=0, ddof=1)
        std[std == 0] = 1.0
        centered = centered / std
    projected = centered @ components
    return PcaResult(components=components, variances=variances, projected=projected)


def load_iris(path=None, strict_shape: bool = True) -> Dataset:
    """Load the iris CSV (4 numeric columns + species label).

    A non-numeric first row is treated as a header and skipped.  With
    ``strict_shape`` the file must contain exactly 150 samples of 4
    features; pass False to accept any shape with 4 feature columns.
    """
    if path is None:
        ref = resources.files("xbaropt").joinpath("data/iris.csv")
        with ref.open("r", newline="") as f:
            return _parse_iris(f, strict_shape)
    with open(path, "r", newline="") as f:
        return _parse_iris(f, strict_shape)


def _parse_iris(f, strict_shape):
    rows = []
    labels = []
    reader = csv.reader(f)
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < 5:
            raise ParseError(f"expected 5 columns, got {len(row)}", line=lineno)
        try:
            values = [float(cell) for cell in row[:4]]
        except ValueError:
            if lineno == 1:
                continue  # header row
            raise ParseError(f"non-numeric value in {row[:4]}", line=lineno)
        rows.append(values)
        labels.append(row[4].strip())
    if not rows:
        raise ParseError("no data rows found")
    values = np.array(rows)
    if strict_shape and values.shape != (150, 4):
        raise WrongShape(f"expected 150x4, got {values.shape[0]}x{values.shape[1]}")
    return Dataset(values=values, labels=labels)


def export_scores(result: PcaResult, labels, path):
    """Write scores as CSV with columns pc1..pck plus the label."""
    k = result.projected.shape[1]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow([f"pc{i + 1}" for i in range(k)] + ["label"])
        for i, row in enumerate(result.projected):
            label = labels[i] if labels is not None else ""
            writer.writerow([repr(float(v)) for v in row] + [label])
