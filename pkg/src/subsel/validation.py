"""Input coercion shared by the estimator layer.

Raw arrays coming from callers are normalized into the toolkit's value
types here, so the estimators accept plain numpy/list inputs the way
sklearn transformers do.
"""

from __future__ import annotations

import numpy as np

from .model import EmbeddingMatrix, SimilarityMatrix, ValidationError

__all__ = ["as_embedding_matrix", "as_similarity_matrix", "as_utility_vector", "check_budget"]


def as_embedding_matrix(X) -> EmbeddingMatrix:
    if isinstance(X, EmbeddingMatrix):
        return X
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"expected a 2-d (n_samples, n_features) array, got shape {arr.shape}")
    return EmbeddingMatrix(arr)


def as_similarity_matrix(X) -> SimilarityMatrix:
    if isinstance(X, SimilarityMatrix):
        return X
    return SimilarityMatrix(np.asarray(X, dtype=np.float64))


def as_utility_vector(y, n: int) -> np.ndarray:
    if y is None:
        raise ValidationError("this selector needs per-sample utilities passed as y")
    arr = np.asarray(y, dtype=np.float64).reshape(-1)
    if arr.shape[0] != n:
        raise ValidationError(f"got {arr.shape[0]} utilities for {n} samples")
    if arr.size and (not np.isfinite(arr).all() or arr.min() < 0.0 or arr.max() > 1.0):
        raise ValidationError("utilities must be finite and lie in [0, 1]")
    return arr


def check_budget(budget, n: int) -> int:
    b = int(budget)
    if b < 0:
        raise ValidationError(f"budget must be non-negative, got {budget}")
    if b > n:
        raise ValidationError(f"budget {b} exceeds the {n} available samples")
    return b
