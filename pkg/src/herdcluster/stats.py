"""Correlation analysis, z-score standardization and correlation-driven
feature selection."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dataset import HerdTable, canonical_key
from .errors import DegenerateInputError, ValidationError


def pearson_r(x, y) -> float:
    """Product-moment correlation coefficient, clipped to [-1, 1]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError(
            f"length mismatch: {x.shape} vs {y.shape}"
        )
    if x.size < 2:
        raise ValidationError("need at least 2 observations")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(np.dot(xc, xc))
    sy = float(np.dot(yc, yc))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInputError("constant input has no defined correlation")
    r = float(np.dot(xc, yc)) / np.sqrt(sx * sy)
    return float(min(1.0, max(-1.0, r)))


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric Pearson correlation matrix over an ordered key list."""

    keys: tuple[str, ...]
    r: np.ndarray

    def value(self, key_a, key_b) -> float:
        i = self.keys.index(canonical_key(key_a))
        j = self.keys.index(canonical_key(key_b))
        return float(self.r[i, j])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["key", *self.keys])
            for i, key in enumerate(self.keys):
                writer.writerow([key, *(repr(v) for v in self.r[i])])

    def as_dict(self) -> dict:
        return {"keys": list(self.keys), "r": [list(map(float, row)) for row in self.r]}

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.as_dict(), fh, indent=2, sort_keys=True)


def correlation_matrix(table: HerdTable, keys: Sequence[str] | None = None) -> CorrelationMatrix:
    """Pairwise Pearson correlations; each pair is computed once so the
    result is exactly symmetric."""
    keys = tuple(table.keys if keys is None else (canonical_key(k) for k in keys))
    cols = [table.column(k) for k in keys]
    n = len(keys)
    r = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            try:
                r[i, j] = r[j, i] = pearson_r(cols[i], cols[j])
            except DegenerateInputError as exc:
                raise DegenerateInputError(
                    f"correlation undefined for pair ({keys[i]}, {keys[j]}): {exc}"
                ) from None
    return CorrelationMatrix(keys, r)


@dataclass(frozen=True)
class FeatureSelection:
    """Keys ranked by |r| with the target, strongest first."""

    target: str
    selected: tuple[str, ...]
    r_values: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "target": self.target,
            "selected": list(self.selected),
            "r_values": list(self.r_values),
        }


def select_features(
    m: CorrelationMatrix,
    target,
    count: int,
    exclude: Iterable[str] = (),
    include_target: bool = False,
) -> FeatureSelection:
    """Top-`count` keys by absolute correlation with `target`, descending.
    Ties break by the matrix's key order."""
    target = canonical_key(target)
    if target not in m.keys:
        raise ValidationError(f"target {target} not in correlation matrix")
    if count < 1:
        raise ValidationError("count must be positive")
    excluded = {canonical_key(k) for k in exclude}
    t = m.keys.index(target)
    candidates = [
        (i, key) for i, key in enumerate(m.keys)
        if key not in excluded and (include_target or key != target)
    ]
    if count > len(candidates):
        raise ValidationError(
            f"count {count} exceeds {len(candidates)} candidate keys"
        )
    ranked = sorted(candidates, key=lambda c: (-abs(m.r[t, c[0]]), c[0]))[:count]
    return FeatureSelection(
        target=target,
        selected=tuple(key for _, key in ranked),
        r_values=tuple(float(m.r[t, i]) for i, _ in ranked),
    )


class ZScoreScaler:
    """Column-wise (x - mean) / sample-std transformer with inverse.

    Follows the fit/transform estimator convention; parameters learned by
    `fit` carry a trailing underscore.
    """

    def fit(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValidationError("expected a 2-d array")
        self.means_ = X.mean(axis=0)
        self.stds_ = X.std(axis=0, ddof=1)
        bad = np.where(self.stds_ == 0.0)[0]
        if bad.size:
            raise DegenerateInputError(
                f"zero-variance column(s) at index {bad.tolist()}"
            )
        return self

    def transform(self, X):
        X = np.asarray(X, dtype=float)
        return (X - self.means_) / self.stds_

    def fit_transform(self, X):
        return self.fit(X).transform(X)

    def inverse_transform(self, Z):
        Z = np.asarray(Z, dtype=float)
        return Z * self.stds_ + self.means_

    def get_params(self, deep=True):
        return {}

    def set_params(self, **params):
        if params:
            raise ValidationError(f"unknown parameters: {sorted(params)}")
        return self


@dataclass(frozen=True)
class StandardizedMatrix:
    """Z-scored feature matrix with the per-key means/stds needed to
    invert the transform."""

    keys: tuple[str, ...]
    animal_ids: tuple[str, ...]
    z: np.ndarray
    means: np.ndarray
    stds: np.ndarray

    def inverse(self) -> np.ndarray:
        return self.z * self.stds + self.means


def zscore(table: HerdTable, keys: Sequence[str]) -> StandardizedMatrix:
    """Standardize the selected columns to zero mean, unit sample std."""
    keys = tuple(canonical_key(k) for k in keys)
    X = table.matrix(keys)
    scaler = ZScoreScaler()
    try:
        z = scaler.fit_transform(X)
    except DegenerateInputError as exc:
        bad = [keys[i] for i in np.where(X.std(axis=0) == 0.0)[0]]
        raise DegenerateInputError(
            f"zero-variance column(s): {', '.join(bad)}"
        ) from exc
    return StandardizedMatrix(
        keys=keys,
        animal_ids=table.animal_ids,
        z=z,
        means=scaler.means_,
        stds=scaler.stds_,
    )


def label_correlation(labels, table: HerdTable, key) -> float:
    """Pearson r between integer cluster labels (treated as numeric) and a
    measurement column."""
    labels = np.asarray(labels)
    if labels.size and np.unique(labels).size < 2:
        raise DegenerateInputError("labels are constant")
    return pearson_r(labels.astype(float), table.column(key))
