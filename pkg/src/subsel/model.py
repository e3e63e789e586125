"""Shared value types for the subset-selection toolkit.

Every type validates its invariants once at construction and is immutable
afterwards (numpy buffers are flipped to read-only), so instances can be
shared freely across threads and reused between pipeline stages.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "ValidationError",
    "ExampleRecord",
    "EmbeddingMatrix",
    "ScoreTable",
    "SimilarityMatrix",
    "SelectionResult",
    "TokenProbRecord",
    "check_dense_ids",
]

SYMMETRY_TOL = 1e-9
DIAGONAL_TOL = 1e-9

ParamValue = int | float | str


class ValidationError(ValueError):
    """An input would violate a structural invariant of a value type."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _as_float_array(values, name: str, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValidationError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class ExampleRecord:
    """One dataset item; `id` indexes into every aligned matrix and table."""

    id: int
    external_key: str | None = None
    text: str | None = None
    subdomain: str | None = None

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValidationError(f"example id must be non-negative, got {self.id}")


def check_dense_ids(records: Sequence[ExampleRecord]) -> None:
    """Require record ids to be unique and to cover exactly 0..n-1."""
    ids = sorted(r.id for r in records)
    if ids != list(range(len(ids))):
        raise ValidationError("example ids must be unique and form a dense 0..n-1 range")


@dataclass(frozen=True)
class EmbeddingMatrix:
    """n x d matrix of finite reals; row i is the embedding of example i.

    Zero rows are rejected because every downstream kernel divides by the
    row norm.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_float_array(self.values, "embeddings", 2)
        if arr.shape[1] < 1:
            raise ValidationError("embedding dimension must be at least 1")
        finite_rows = np.isfinite(arr).all(axis=1)
        if not finite_rows.all():
            bad = int(np.flatnonzero(~finite_rows)[0])
            raise ValidationError(f"embedding row {bad} contains a non-finite value")
        if arr.shape[0]:
            nonzero_rows = np.any(arr != 0.0, axis=1)
            if not nonzero_rows.all():
                bad = int(np.flatnonzero(~nonzero_rows)[0])
                raise ValidationError(f"embedding row {bad} is all zeros")
        object.__setattr__(self, "values", _freeze(arr))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ScoreTable:
    """Per-example perplexity, reasoning loss, and optional combined utility.

    Perplexities derived from token probabilities are always >= 1, so values
    below 1 are rejected as corrupt. Utilities, when present, live in [0, 1].
    """

    ppl: np.ndarray
    cot_loss: np.ndarray
    utility: np.ndarray | None = None

    def __post_init__(self) -> None:
        ppl = _as_float_array(self.ppl, "ppl", 1)
        cot = _as_float_array(self.cot_loss, "cot_loss", 1)
        if ppl.shape != cot.shape:
            raise ValidationError(
                f"ppl and cot_loss must align, got {ppl.shape[0]} vs {cot.shape[0]} rows"
            )
        bad = np.flatnonzero(~np.isfinite(ppl) | (ppl < 1.0))
        if bad.size:
            raise ValidationError(f"ppl for id {int(bad[0])} must be finite and >= 1")
        bad = np.flatnonzero(~np.isfinite(cot) | (cot < 0.0))
        if bad.size:
            raise ValidationError(f"cot_loss for id {int(bad[0])} must be finite and >= 0")
        object.__setattr__(self, "ppl", _freeze(ppl))
        object.__setattr__(self, "cot_loss", _freeze(cot))
        if self.utility is not None:
            util = _as_float_array(self.utility, "utility", 1)
            if util.shape != ppl.shape:
                raise ValidationError("utility column must align with ppl rows")
            bad = np.flatnonzero(~np.isfinite(util) | (util < 0.0) | (util > 1.0))
            if bad.size:
                raise ValidationError(f"utility for id {int(bad[0])} must lie in [0, 1]")
            object.__setattr__(self, "utility", _freeze(util))

    @property
    def n(self) -> int:
        return self.ppl.shape[0]

    def require_utility(self) -> np.ndarray:
        if self.utility is None:
            raise ValidationError("score table has no utility column; compute it first")
        return self.utility


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric n x n similarity matrix with unit diagonal, entries in [-1, 1]."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = _as_float_array(self.values, "similarity", 2)
        if arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"similarity matrix must be square, got {arr.shape}")
        if arr.size:
            if not np.isfinite(arr).all():
                raise ValidationError("similarity matrix contains a non-finite value")
            if arr.min() < -1.0 or arr.max() > 1.0:
                raise ValidationError("similarity entries must lie in [-1, 1]")
            if np.abs(arr - arr.T).max() > SYMMETRY_TOL:
                raise ValidationError(f"similarity matrix is not symmetric within {SYMMETRY_TOL}")
            if np.abs(np.diag(arr) - 1.0).max() > DIAGONAL_TOL:
                raise ValidationError(f"similarity diagonal must equal 1 within {DIAGONAL_TOL}")
        object.__setattr__(self, "values", _freeze(arr))

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _check_param_token(text: str, what: str) -> str:
    if not text or any(c.isspace() for c in text) or "=" in text:
        raise ValidationError(f"{what} must be non-empty and contain no spaces or '=': {text!r}")
    return text


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of one selection run.

    `selected` preserves pick order; `gains` holds the per-step score of
    each pick, so both always have the same length.
    """

    method: str
    budget: int
    selected: tuple[int, ...]
    gains: tuple[float, ...]
    objective: float
    params: Mapping[str, ParamValue] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _check_param_token(self.method, "method tag")
        if self.budget < 0:
            raise ValidationError(f"budget must be non-negative, got {self.budget}")
        selected = tuple(int(i) for i in self.selected)
        gains = tuple(float(g) for g in self.gains)
        if len(selected) > self.budget:
            raise ValidationError(f"{len(selected)} ids selected under budget {self.budget}")
        if len(set(selected)) != len(selected):
            raise ValidationError("selected ids must be distinct")
        if any(i < 0 for i in selected):
            raise ValidationError("selected ids must be non-negative")
        if len(gains) != len(selected):
            raise ValidationError("one gain must be recorded per selected id")
        if not np.isfinite(self.objective):
            raise ValidationError("objective must be finite")
        params = dict(self.params)
        for key, value in params.items():
            _check_param_token(key, "param key")
            if isinstance(value, str):
                _check_param_token(value, f"param {key!r}")
            elif not isinstance(value, (int, float)):
                raise ValidationError(f"param {key!r} must be int, float, or str")
        object.__setattr__(self, "selected", selected)
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "objective", float(self.objective))
        object.__setattr__(self, "params", params)


@dataclass(frozen=True)
class TokenProbRecord:
    """Per-token probabilities of example i's target tokens, with and without
    example j prepended as context. Probabilities live in (0, 1]."""

    i: int
    j: int
    base_probs: np.ndarray
    cond_probs: np.ndarray

    def __post_init__(self) -> None:
        if self.i < 0 or self.j < 0:
            raise ValidationError(f"pair ids must be non-negative, got ({self.i}, {self.j})")
        base = _as_float_array(self.base_probs, "base_probs", 1)
        cond = _as_float_array(self.cond_probs, "cond_probs", 1)
        if base.shape[0] < 1:
            raise ValidationError("a token-probability record needs at least one token")
        if base.shape != cond.shape:
            raise ValidationError(
                f"base ({base.shape[0]}) and cond ({cond.shape[0]}) token counts differ"
            )
        for name, arr in (("base", base), ("cond", cond)):
            if not np.isfinite(arr).all() or arr.min() <= 0.0 or arr.max() > 1.0:
                raise ValidationError(f"{name} probabilities must lie in (0, 1]")
        object.__setattr__(self, "base_probs", _freeze(base))
        object.__setattr__(self, "cond_probs", _freeze(cond))

    @property
    def length(self) -> int:
        return self.base_probs.shape[0]
