"""Sklearn-style selector estimators.

Each selector is fit on an (n_samples, n_features) embedding matrix, or on
a precomputed similarity matrix when `precomputed=True`. Fitting runs the
selection and exposes

    selected_ids_   pick order, as an int array
    gains_          per-step scores
    objective_      final objective value
    result_         the full SelectionResult

`transform(X)` keeps the selected rows, so a fitted selector drops samples
the same way resamplers do. Parameters follow sklearn conventions and are
untouched by fit, so `clone` and `get_params` work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .baselines import RandomConfig, dpp_greedy_select, random_select
from .greedy import GreedyConfig, greedy_maximize, utility_diversity_select
from .model import SelectionResult, SimilarityMatrix
from .similarity import CLIP_AT_ZERO, RAW, KernelTransform, apply_transform, cosine_similarity_matrix
from .submodular import DEFAULT_RIDGE, FACILITY_LOCATION, SubmodularSpec
from .validation import as_embedding_matrix, as_similarity_matrix, as_utility_vector, check_budget

__all__ = [
    "SubmodularSelector",
    "UtilityDiversitySelector",
    "DppSelector",
    "RandomSelector",
]


class _BaseSelector(TransformerMixin, BaseEstimator):
    def _select(self, X, y) -> SelectionResult:
        raise NotImplementedError

    def fit(self, X, y=None):
        result = self._select(X, y)
        self.result_ = result
        self.selected_ids_ = np.asarray(result.selected, dtype=np.intp)
        self.gains_ = np.asarray(result.gains, dtype=np.float64)
        self.objective_ = result.objective
        self.n_samples_ = self._n_samples(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "selected_ids_")
        arr = np.asarray(X)
        if arr.shape[0] != self.n_samples_:
            raise ValueError(f"X has {arr.shape[0]} rows, selector was fit on {self.n_samples_}")
        return arr[self.selected_ids_]

    @staticmethod
    def _n_samples(X) -> int:
        return np.asarray(X).shape[0]


def _similarity_from(X, precomputed: bool, kernel_transform: str) -> SimilarityMatrix:
    if precomputed:
        sim = as_similarity_matrix(X)
    else:
        sim = cosine_similarity_matrix(as_embedding_matrix(X))
    return apply_transform(sim, KernelTransform(kernel_transform))


class SubmodularSelector(_BaseSelector):
    """Greedy maximization of a coverage-style set function.

    The default clips negative cosine similarities to zero, which keeps the
    coverage reading of the kernel ("unrelated" contributes nothing).
    """

    def __init__(
        self,
        budget=10,
        variant=FACILITY_LOCATION,
        precomputed=False,
        kernel_transform=CLIP_AT_ZERO,
        mode="lazy",
        eta=1.0,
        nu=1.0,
        cut_penalty=0.5,
        ridge=DEFAULT_RIDGE,
        target_ids=(),
        existing_ids=(),
    ):
        self.budget = budget
        self.variant = variant
        self.precomputed = precomputed
        self.kernel_transform = kernel_transform
        self.mode = mode
        self.eta = eta
        self.nu = nu
        self.cut_penalty = cut_penalty
        self.ridge = ridge
        self.target_ids = target_ids
        self.existing_ids = existing_ids

    def _select(self, X, y):
        sim = _similarity_from(X, self.precomputed, self.kernel_transform)
        budget = check_budget(self.budget, sim.n)
        spec = SubmodularSpec(
            variant=self.variant,
            S=sim,
            target_ids=frozenset(int(i) for i in self.target_ids),
            existing_ids=frozenset(int(i) for i in self.existing_ids),
            eta=self.eta,
            nu=self.nu,
            cut_penalty=self.cut_penalty,
            ridge=self.ridge,
        )
        return greedy_maximize(spec, GreedyConfig(budget=budget, mode=self.mode))


class UtilityDiversitySelector(_BaseSelector):
    """Balanced greedy over per-sample utilities and pairwise dissimilarity.

    Utilities arrive as `y` at fit time (values in [0, 1], e.g. the combined
    normalized perplexity and reasoning-loss score).
    """

    def __init__(self, budget=10, lam=0.5, precomputed=False, kernel_transform=RAW):
        self.budget = budget
        self.lam = lam
        self.precomputed = precomputed
        self.kernel_transform = kernel_transform

    def _select(self, X, y):
        sim = _similarity_from(X, self.precomputed, self.kernel_transform)
        budget = check_budget(self.budget, sim.n)
        utilities = as_utility_vector(y, sim.n)
        return utility_diversity_select(utilities, sim, GreedyConfig(budget=budget, lam=self.lam))

    def fit(self, X, y=None):
        return super().fit(X, y)


class DppSelector(_BaseSelector):
    """Greedy determinantal (log-det MAP) selection over the cosine kernel."""

    def __init__(self, budget=10, ridge=DEFAULT_RIDGE, precomputed=False, kernel_transform=RAW):
        self.budget = budget
        self.ridge = ridge
        self.precomputed = precomputed
        self.kernel_transform = kernel_transform

    def _select(self, X, y):
        sim = _similarity_from(X, self.precomputed, self.kernel_transform)
        budget = check_budget(self.budget, sim.n)
        return dpp_greedy_select(sim, budget, ridge=self.ridge)


class RandomSelector(_BaseSelector):
    """Seeded uniform sample without replacement; a reproducible baseline."""

    def __init__(self, budget=10, seed=0):
        self.budget = budget
        self.seed = seed

    def _select(self, X, y):
        n = self._n_samples(X)
        budget = check_budget(self.budget, n)
        return random_select(n, RandomConfig(seed=self.seed, budget=budget))
