"""Budgeted greedy selection engines.

`greedy_maximize` picks the best marginal gain each step, either naively
(scan every candidate) or lazily (stale-upper-bound heap). For functions
with diminishing gains both modes return the identical sequence because
ties are always broken toward the lowest id.

`utility_diversity_select` runs the balanced loop: each step picks

    argmax_x  lam * U(x) + (1 - lam) * sum_{y selected} (1 - S_xy)

and reports the combined objective lam * sum U + (1 - lam) * dispersion.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .evaluation import diversity_score
from .model import ScoreTable, SelectionResult, SimilarityMatrix, ValidationError
from .submodular import (
    CONDITIONAL_GAIN,
    GRAPH_CUT,
    LOG_DETERMINANT,
    MUTUAL_INFORMATION,
    GainState,
    SubmodularSpec,
    evaluate,
)

__all__ = ["MODES", "GreedyConfig", "greedy_maximize", "utility_diversity_select"]

NAIVE = "naive"
LAZY = "lazy"
MODES = (NAIVE, LAZY)


@dataclass(frozen=True)
class GreedyConfig:
    budget: int
    mode: str = LAZY
    lam: float = 0.5  # utility/diversity trade-off; ties always go to the lowest id

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise ValidationError(f"budget must be non-negative, got {self.budget}")
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if not (0.0 <= self.lam <= 1.0):
            raise ValidationError(f"lam must lie in [0, 1], got {self.lam}")


def _check_budget(budget: int, n: int) -> None:
    if budget > n:
        raise ValidationError(f"budget {budget} exceeds ground-set size {n}")


def _lazy_steps(state: GainState, n: int, budget: int):
    # Heap of (-gain, id); an entry is trusted only if refreshed this step.
    # Stale entries are upper bounds under diminishing gains, so the first
    # fresh entry popped is the true argmax, with id as tie-break.
    heap = [(-state.gain(v), v) for v in range(n)]
    heapq.heapify(heap)
    refreshed_at = [0] * n
    for step in range(budget):
        while True:
            neg_gain, v = heapq.heappop(heap)
            if refreshed_at[v] == step:
                yield v, -neg_gain
                state.add(v)
                break
            gain = state.gain(v)
            refreshed_at[v] = step
            heapq.heappush(heap, (-gain, v))


def greedy_maximize(spec: SubmodularSpec, cfg: GreedyConfig) -> SelectionResult:
    """Budget-constrained greedy maximization of the configured set function."""
    n = spec.n
    _check_budget(cfg.budget, n)
    state = GainState(spec)
    selected: list[int] = []
    gains: list[float] = []
    if cfg.mode == NAIVE:
        in_set = np.zeros(n, dtype=bool)
        for _ in range(cfg.budget):
            best_gain = -np.inf
            best_id = -1
            for v in range(n):
                if in_set[v]:
                    continue
                gain = state.gain(v)
                if gain > best_gain:
                    best_gain, best_id = gain, v
            selected.append(best_id)
            gains.append(best_gain)
            in_set[best_id] = True
            state.add(best_id)
    else:
        for v, gain in _lazy_steps(state, n, cfg.budget):
            selected.append(v)
            gains.append(gain)
    params: dict[str, int | float | str] = {"variant": spec.variant, "mode": cfg.mode}
    if spec.variant == MUTUAL_INFORMATION:
        params["eta"] = spec.eta
    if spec.variant == CONDITIONAL_GAIN:
        params["nu"] = spec.nu
    if spec.variant == GRAPH_CUT:
        params["cut_penalty"] = spec.cut_penalty
    if spec.variant == LOG_DETERMINANT:
        params["ridge"] = spec.ridge
    return SelectionResult(
        method=f"greedy-{spec.variant}",
        budget=cfg.budget,
        selected=tuple(selected),
        gains=tuple(gains),
        objective=evaluate(spec, selected),
        params=params,
    )


def _balanced_steps(utilities: np.ndarray, sim: np.ndarray, budget: int, lam: float):
    n = utilities.shape[0]
    dispersion = np.zeros(n)  # sum_{y in A} (1 - s_xy) per candidate
    taken = np.zeros(n, dtype=bool)
    for _ in range(budget):
        scores = lam * utilities + (1.0 - lam) * dispersion
        scores[taken] = -np.inf
        v = int(np.argmax(scores))  # first maximum, i.e. lowest id on ties
        yield v, float(scores[v])
        taken[v] = True
        dispersion = dispersion + (1.0 - sim[:, v])


def utility_diversity_select(
    scores: ScoreTable | Sequence[float] | np.ndarray,
    S: SimilarityMatrix,
    cfg: GreedyConfig,
) -> SelectionResult:
    """Balanced greedy over per-example utilities and pairwise dissimilarity."""
    if isinstance(scores, ScoreTable):
        utilities = scores.require_utility()
    else:
        utilities = np.asarray(scores, dtype=np.float64)
        if utilities.ndim != 1 or not np.isfinite(utilities).all():
            raise ValidationError("utilities must be a 1-d finite vector")
        if utilities.size and (utilities.min() < 0.0 or utilities.max() > 1.0):
            raise ValidationError("utilities must lie in [0, 1]")
    n = S.n
    if utilities.shape[0] != n:
        raise ValidationError(f"{utilities.shape[0]} utilities for a {n}-element similarity matrix")
    _check_budget(cfg.budget, n)
    selected: list[int] = []
    gains: list[float] = []
    for v, score in _balanced_steps(utilities, S.values, cfg.budget, cfg.lam):
        selected.append(v)
        gains.append(score)
    objective = cfg.lam * float(utilities[selected].sum()) + (1.0 - cfg.lam) * diversity_score(S, selected)
    return SelectionResult(
        method="utility-diversity",
        budget=cfg.budget,
        selected=tuple(selected),
        gains=tuple(gains),
        objective=objective,
        params={"lambda": cfg.lam},
    )
