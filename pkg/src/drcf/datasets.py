"""Benchmark datasets: the synthetic toy generator, seeded Lloyd k-means for
its labels, and CSV ingestion for external tabular data."""

from __future__ import annotations

import csv

import numpy as np

from .core import Dataset
from .errors import DataError, InputError


def kmeans_lloyd(X, k: int, seed: int = 0, max_iter: int = 100) -> np.ndarray:
    """Lloyd's algorithm with k-means++ initialization; deterministic under
    the seed. Returns the label per row."""
    X = np.asarray(X, dtype=np.float64)
    m = X.shape[0]
    if not (1 <= k <= m):
        raise InputError(f"k must be in [1, {m}]")
    rng = np.random.default_rng(seed)

    # k-means++ seeding
    centers = [X[rng.integers(m)]]
    for _ in range(k - 1):
        d2 = np.min(
            np.stack([np.sum((X - c) ** 2, axis=1) for c in centers]), axis=0
        )
        probs = d2 / d2.sum() if d2.sum() > 0 else np.full(m, 1.0 / m)
        centers.append(X[rng.choice(m, p=probs)])
    centers = np.stack(centers)

    labels = None
    for it in range(max_iter):
        d2 = np.sum((X[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            pts = X[labels == c]
            if len(pts):
                centers[c] = pts.mean(axis=0)
    return labels


def gen_toy(n: int = 500, d: int = 10, seed: int = 0) -> Dataset:
    """Independent Gaussian features with random means in [-5, 5], unit
    variance, standardized; binary labels from a 2-means split."""
    if n < 4:
        raise InputError("n must be >= 4")
    rng = np.random.default_rng(seed)
    means = rng.uniform(-5.0, 5.0, size=d)
    X_raw = rng.normal(loc=means, scale=1.0, size=(n, d))
    ds = Dataset.standardize(X_raw, np.zeros(n, dtype=np.int64))
    labels = kmeans_lloyd(ds.X, 2, seed=seed)
    return Dataset(
        X=ds.X, labels=labels, feature_names=ds.feature_names, mean_=ds.mean_, std_=ds.std_
    )


def load_csv(path, label_column: str) -> Dataset:
    """Parse a rectangular numeric CSV with header, standardize the feature
    columns and extract the label column."""
    try:
        fh = open(path, newline="")
    except FileNotFoundError:
        raise DataError(f"data file not found: {path}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column not in header:
            raise DataError(f"{path}: missing label column {label_column!r}")
        label_idx = header.index(label_column)
        rows = []
        for rownum, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {rownum} has {len(row)} cells, expected {len(header)}"
                )
            parsed = []
            for colnum, cell in enumerate(row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}: non-numeric cell at row {rownum}, column "
                        f"{header[colnum]!r}: {cell!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise DataError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=np.float64)
    features = np.delete(data, label_idx, axis=1)
    labels = data[:, label_idx]
    names = [h for i, h in enumerate(header) if i != label_idx]
    return Dataset.standardize(features, np.round(labels).astype(np.int64), names)
