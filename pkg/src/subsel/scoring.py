"""Utility mathematics.

Per-example utility is a convex combination of min-max normalized
perplexity and reasoning loss:

    U(x) = alpha * norm(PPL(x)) + (1 - alpha) * norm(CoTLoss(x))

Pairwise utility measures how much prepending example j as context helps
the model predict example i's target tokens, either as a drop in
length-normalized Euclidean distance from the one-hot target or as the
summed per-token log probability ratio (pointwise mutual information).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import ScoreTable, TokenProbRecord, ValidationError

__all__ = [
    "DISTANCE_MODES",
    "LENGTH_NORMALIZED_EUCLIDEAN",
    "LOG_RATIO",
    "UtilityParams",
    "perplexity_from_probs",
    "minmax_normalize",
    "combined_utility",
    "pairwise_utility",
    "pmi_utility",
    "utility_for_record",
]

LENGTH_NORMALIZED_EUCLIDEAN = "length-normalized-euclidean"
LOG_RATIO = "log-ratio"
DISTANCE_MODES = (LENGTH_NORMALIZED_EUCLIDEAN, LOG_RATIO)


@dataclass(frozen=True)
class UtilityParams:
    alpha: float = 0.5
    distance_mode: str = LENGTH_NORMALIZED_EUCLIDEAN

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha <= 1.0):
            raise ValidationError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.distance_mode not in DISTANCE_MODES:
            raise ValidationError(
                f"unknown distance mode {self.distance_mode!r}, expected one of {DISTANCE_MODES}"
            )


def perplexity_from_probs(token_probs: Sequence[float]) -> float:
    """exp of the average negative log probability; 1.0 means no surprisal."""
    probs = np.asarray(token_probs, dtype=np.float64)
    if probs.ndim != 1 or probs.size == 0:
        raise ValueError("token probabilities must be a non-empty 1-d sequence")
    if not np.isfinite(probs).all() or probs.min() <= 0.0 or probs.max() > 1.0:
        raise ValueError("token probabilities must lie in (0, 1]")
    return float(np.exp(-np.mean(np.log(probs))))


def minmax_normalize(values: Sequence[float]) -> np.ndarray:
    """Affine map onto [0, 1]; a constant vector maps to all zeros."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("values must be a non-empty 1-d sequence")
    if not np.isfinite(arr).all():
        raise ValueError("values must all be finite")
    lo, hi = float(arr.min()), float(arr.max())
    if hi == lo:
        return np.zeros_like(arr)
    return (arr - lo) / (hi - lo)


def combined_utility(table: ScoreTable, params: UtilityParams) -> ScoreTable:
    """Fill the utility column from the ppl and cot_loss columns."""
    alpha = params.alpha
    utility = alpha * minmax_normalize(table.ppl) + (1.0 - alpha) * minmax_normalize(table.cot_loss)
    # convex combination of [0,1] values; clip float spill at the boundary
    np.clip(utility, 0.0, 1.0, out=utility)
    return dataclasses.replace(table, utility=utility)


def pairwise_utility(
    rec: TokenProbRecord,
    params: UtilityParams | None = None,
    length_normalize: bool = True,
) -> float:
    """Distance-form information gain of context j for predicting target i.

    d(target, p) = |1 - p|_2 / sqrt(T); the gain is d(base) - d(cond), so a
    positive value means the context moved the model toward the target.
    `length_normalize=False` keeps the raw Euclidean norm instead.
    """
    if params is not None and params.distance_mode != LENGTH_NORMALIZED_EUCLIDEAN:
        raise ValueError(
            f"pairwise_utility implements {LENGTH_NORMALIZED_EUCLIDEAN!r}; "
            f"use pmi_utility for {LOG_RATIO!r}"
        )
    d_base = float(np.linalg.norm(1.0 - rec.base_probs))
    d_cond = float(np.linalg.norm(1.0 - rec.cond_probs))
    if length_normalize:
        scale = np.sqrt(rec.length)
        d_base /= scale
        d_cond /= scale
    return d_base - d_cond


def pmi_utility(rec: TokenProbRecord) -> float:
    """Sum over tokens of log(cond / base): the KL-distance form of the gain."""
    return float(np.sum(np.log(rec.cond_probs) - np.log(rec.base_probs)))


def utility_for_record(rec: TokenProbRecord, params: UtilityParams) -> float:
    if params.distance_mode == LOG_RATIO:
        return pmi_utility(rec)
    return pairwise_utility(rec, params)
