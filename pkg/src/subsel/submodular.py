"""Coverage- and diversity-style set functions over a similarity kernel.

Five variants share one evaluation interface:

    facility-location   f(X) = sum_i max_{j in X} s_ij
    mutual-information  f(X) = sum_i max_{j in X} s_ij + eta * sum_{j in X} max_{t in T} s_tj
    conditional-gain    f(X) = sum_i max(max_{j in X} s_ij - nu * max_{e in E} s_ie, 0)
    graph-cut           f(X) = sum_{i, j in X} s_ij over all i - penalty * sum_{i,j in X} s_ij
    log-determinant     f(X) = log det(S_X + ridge * I)

All variants use f(empty) = 0 and max over an empty index set = 0, which
the greedy engine relies on. `evaluate` computes from scratch; `GainState`
answers marginal-gain queries against a growing selection without
re-evaluating from scratch (a per-element best-coverage vector for the max
variants, running selected-similarity sums for graph-cut, and an extending
Cholesky factor for log-determinant).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.linalg import solve_triangular

from .model import SimilarityMatrix, ValidationError

__all__ = [
    "VARIANTS",
    "FACILITY_LOCATION",
    "MUTUAL_INFORMATION",
    "CONDITIONAL_GAIN",
    "GRAPH_CUT",
    "LOG_DETERMINANT",
    "NotPositiveDefiniteError",
    "SubmodularSpec",
    "GainState",
    "evaluate",
]

FACILITY_LOCATION = "facility-location"
MUTUAL_INFORMATION = "mutual-information"
CONDITIONAL_GAIN = "conditional-gain"
GRAPH_CUT = "graph-cut"
LOG_DETERMINANT = "log-determinant"
VARIANTS = (
    FACILITY_LOCATION,
    MUTUAL_INFORMATION,
    CONDITIONAL_GAIN,
    GRAPH_CUT,
    LOG_DETERMINANT,
)

DEFAULT_RIDGE = 1e-6


class NotPositiveDefiniteError(ArithmeticError):
    """The determinant kernel failed to factorize on some selected block."""


def _npd(ridge: float) -> NotPositiveDefiniteError:
    return NotPositiveDefiniteError(
        f"kernel block is not positive definite at ridge={ridge:g}; "
        "increase --ridge (near-duplicate rows make the cosine kernel singular)"
    )


def _check_id_set(ids, n: int, what: str) -> frozenset[int]:
    out = frozenset(int(i) for i in ids)
    for i in out:
        if i < 0 or i >= n:
            raise ValidationError(f"{what} id {i} outside ground set 0..{n - 1}")
    return out


@dataclass(frozen=True)
class SubmodularSpec:
    """One fully-parameterized set function over the ground set 0..n-1."""

    variant: str
    S: SimilarityMatrix
    target_ids: frozenset[int] | None = None
    existing_ids: frozenset[int] | None = None
    eta: float = 1.0
    nu: float = 1.0
    cut_penalty: float = 0.5
    ridge: float = DEFAULT_RIDGE

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValidationError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        n = self.S.n
        if self.variant == MUTUAL_INFORMATION and self.target_ids is None:
            raise ValidationError("mutual-information requires target_ids")
        if self.variant == CONDITIONAL_GAIN and self.existing_ids is None:
            raise ValidationError("conditional-gain requires existing_ids")
        for name in ("eta", "nu", "cut_penalty", "ridge"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0.0:
                raise ValidationError(f"{name} must be finite and >= 0, got {value}")
        if self.target_ids is not None:
            object.__setattr__(self, "target_ids", _check_id_set(self.target_ids, n, "target"))
        if self.existing_ids is not None:
            object.__setattr__(self, "existing_ids", _check_id_set(self.existing_ids, n, "existing"))

    @property
    def n(self) -> int:
        return self.S.n


def _sorted_subset(ids: Iterable[int], n: int) -> list[int]:
    out = sorted(int(i) for i in ids)
    if len(set(out)) != len(out):
        raise ValidationError("subset ids must be distinct")
    if out and (out[0] < 0 or out[-1] >= n):
        raise ValidationError(f"subset ids must lie in 0..{n - 1}")
    return out


def _target_affinity(spec: SubmodularSpec) -> np.ndarray:
    """Per-candidate best similarity to the target set (zeros when empty)."""
    target = sorted(spec.target_ids or ())
    if not target:
        return np.zeros(spec.n)
    return np.max(spec.S.values[target, :], axis=0)


def _existing_deficit(spec: SubmodularSpec) -> np.ndarray:
    """nu-weighted best similarity of every element to the existing set."""
    existing = sorted(spec.existing_ids or ())
    if not existing:
        return np.zeros(spec.n)
    return spec.nu * np.max(spec.S.values[:, existing], axis=1)


def evaluate(spec: SubmodularSpec, ids: Iterable[int]) -> float:
    """Exact from-scratch value of the configured variant on subset `ids`."""
    S = spec.S.values
    subset = _sorted_subset(ids, spec.n)
    if not subset:
        return 0.0
    if spec.variant == FACILITY_LOCATION:
        return float(np.max(S[:, subset], axis=1).sum())
    if spec.variant == MUTUAL_INFORMATION:
        coverage = np.max(S[:, subset], axis=1).sum()
        return float(coverage + spec.eta * _target_affinity(spec)[subset].sum())
    if spec.variant == CONDITIONAL_GAIN:
        coverage = np.max(S[:, subset], axis=1)
        return float(np.maximum(coverage - _existing_deficit(spec), 0.0).sum())
    if spec.variant == GRAPH_CUT:
        block = S[np.ix_(subset, subset)]
        return float(S[:, subset].sum() - spec.cut_penalty * block.sum())
    kernel = S[np.ix_(subset, subset)] + spec.ridge * np.eye(len(subset))
    try:
        factor = np.linalg.cholesky(kernel)
    except np.linalg.LinAlgError:
        raise _npd(spec.ridge)
    return float(2.0 * np.sum(np.log(np.diag(factor))))


class GainState:
    """Incremental evaluator for one spec over a growing selection.

    Single-owner: only `add` mutates the state. `gain(v)` is pure and may be
    called for many candidates against the same frozen state.
    """

    def __init__(self, spec: SubmodularSpec):
        self.spec = spec
        n = spec.n
        self._S = spec.S.values
        self._selected: list[int] = []
        self._in_set = np.zeros(n, dtype=bool)
        self._value = 0.0
        variant = spec.variant
        if variant in (FACILITY_LOCATION, MUTUAL_INFORMATION, CONDITIONAL_GAIN):
            self._best: np.ndarray | None = None  # running max_{j in A} s_ij
        if variant == MUTUAL_INFORMATION:
            self._affinity = _target_affinity(spec)
            self._cov_sum = 0.0
            self._aff_sum = 0.0
        if variant == CONDITIONAL_GAIN:
            self._deficit = _existing_deficit(spec)
            self._clipped_sum = 0.0
        if variant == GRAPH_CUT:
            self._colsum = self._S.sum(axis=0)
            self._sel_sim = np.zeros(n)  # running sum_{j in A} s_vj per candidate
        if variant == LOG_DETERMINANT:
            self._kernel = self._S + spec.ridge * np.eye(n)
            self._chol = np.zeros((n, n))

    @property
    def selected(self) -> tuple[int, ...]:
        return tuple(self._selected)

    @property
    def value(self) -> float:
        """f(A) for the current selection, tracked incrementally."""
        return self._value

    def _check_candidate(self, v: int) -> int:
        v = int(v)
        if v < 0 or v >= self.spec.n:
            raise ValidationError(f"candidate id {v} outside ground set 0..{self.spec.n - 1}")
        if self._in_set[v]:
            raise ValidationError(f"id {v} is already selected")
        return v

    def _chol_extend(self, v: int) -> tuple[np.ndarray, float]:
        k = len(self._selected)
        if k == 0:
            cross = np.zeros(0)
        else:
            kv = self._kernel[self._selected, v]
            cross = solve_triangular(self._chol[:k, :k], kv, lower=True, check_finite=False)
        residual = self._kernel[v, v] - float(cross @ cross)
        if not np.isfinite(residual) or residual <= 0.0:
            raise _npd(self.spec.ridge)
        return cross, residual

    def gain(self, v: int) -> float:
        """f(A + v) - f(A) without mutating the state.

        The max-style variants use the elementwise increment form
        (sum of per-element improvements) rather than new-total minus
        old-total: every elementwise term is monotone non-increasing in
        the running coverage under IEEE rounding, so computed gains never
        exceed earlier bounds even in floats. The lazy engine relies on
        this to reproduce naive selection exactly.
        """
        v = self._check_candidate(v)
        variant = self.spec.variant
        col = self._S[:, v]
        if variant == FACILITY_LOCATION:
            if self._best is None:
                return float(col.sum())
            return float(np.maximum(col - self._best, 0.0).sum())
        if variant == MUTUAL_INFORMATION:
            if self._best is None:
                cov_gain = float(col.sum())
            else:
                cov_gain = float(np.maximum(col - self._best, 0.0).sum())
            return float(cov_gain + self.spec.eta * self._affinity[v])
        if variant == CONDITIONAL_GAIN:
            new_clipped = np.maximum((col if self._best is None else np.maximum(self._best, col)) - self._deficit, 0.0)
            if self._best is None:
                return float(new_clipped.sum())
            return float((new_clipped - np.maximum(self._best - self._deficit, 0.0)).sum())
        if variant == GRAPH_CUT:
            cut = 2.0 * self._sel_sim[v] + self._S[v, v]
            return float(self._colsum[v] - self.spec.cut_penalty * cut)
        _, residual = self._chol_extend(v)
        return float(np.log(residual))

    def add(self, v: int) -> "GainState":
        """Commit v into the selection and refresh the caches; returns self."""
        v = self._check_candidate(v)
        variant = self.spec.variant
        col = self._S[:, v]
        if variant == FACILITY_LOCATION:
            self._best = col.copy() if self._best is None else np.maximum(self._best, col)
            self._value = float(self._best.sum())
        elif variant == MUTUAL_INFORMATION:
            self._best = col.copy() if self._best is None else np.maximum(self._best, col)
            self._cov_sum = float(self._best.sum())
            self._aff_sum += float(self._affinity[v])
            self._value = self._cov_sum + self.spec.eta * self._aff_sum
        elif variant == CONDITIONAL_GAIN:
            self._best = col.copy() if self._best is None else np.maximum(self._best, col)
            self._clipped_sum = float(np.maximum(self._best - self._deficit, 0.0).sum())
            self._value = self._clipped_sum
        elif variant == GRAPH_CUT:
            self._value += self.gain(v)
            self._sel_sim = self._sel_sim + col
        else:
            cross, residual = self._chol_extend(v)
            k = len(self._selected)
            self._chol[k, :k] = cross
            self._chol[k, k] = np.sqrt(residual)
            self._value = float(2.0 * np.sum(np.log(np.diag(self._chol[: k + 1, : k + 1]))))
        self._selected.append(v)
        self._in_set[v] = True
        return self
