"""Shared instance builders for the test suite."""

from __future__ import annotations

import numpy as np

from subsel import (
    EmbeddingMatrix,
    KernelTransform,
    ScoreTable,
    SimilarityMatrix,
    SubmodularSpec,
    apply_transform,
    cosine_similarity_matrix,
)
from subsel.submodular import LOG_DETERMINANT, VARIANTS


def random_embeddings(rng: np.random.Generator, n: int, d: int = 6, nonneg: bool = False) -> EmbeddingMatrix:
    values = rng.normal(size=(n, d))
    if nonneg:
        values = np.abs(values) + 1e-3
    return EmbeddingMatrix(values)


def cosine_kernel(rng: np.random.Generator, n: int, d: int = 6, clip: bool = True, nonneg: bool = False) -> SimilarityMatrix:
    sim = cosine_similarity_matrix(random_embeddings(rng, n, d, nonneg=nonneg))
    if clip:
        sim = apply_transform(sim, KernelTransform("clip-at-zero"))
    return sim


def random_spec(rng: np.random.Generator, variant: str, S: SimilarityMatrix, ridge: float = 1.0) -> SubmodularSpec:
    """Randomized parameters inside the monotone-submodular regime."""
    n = S.n
    assert variant in VARIANTS
    return SubmodularSpec(
        variant=variant,
        S=S,
        target_ids=frozenset(int(i) for i in rng.choice(n, size=min(3, n), replace=False)),
        existing_ids=frozenset(int(i) for i in rng.choice(n, size=min(2, n), replace=False)),
        eta=float(rng.uniform(0.0, 2.0)),
        nu=float(rng.uniform(0.0, 1.0)),
        cut_penalty=float(rng.uniform(0.0, 0.5)),
        ridge=ridge,
    )


def monotone_instance(rng: np.random.Generator, variant: str, n: int, ridge: float = 1.0) -> SubmodularSpec:
    """Instance on a clipped cosine kernel; log-det gets a PSD kernel."""
    S = cosine_kernel(rng, n, nonneg=(variant == LOG_DETERMINANT))
    return random_spec(rng, variant, S, ridge=ridge)


def random_similarity(rng: np.random.Generator, n: int, low: float = -0.5, high: float = 1.0) -> SimilarityMatrix:
    """Symmetric matrix with unit diagonal, off-diagonals uniform in [low, high]."""
    raw = rng.uniform(low, high, size=(n, n))
    sym = np.clip((raw + raw.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(sym, 1.0)
    return SimilarityMatrix(sym)


def random_scores(rng: np.random.Generator, n: int, with_utility: bool = True) -> ScoreTable:
    ppl = 1.0 + rng.uniform(0.0, 9.0, size=n)
    cot = rng.uniform(0.0, 3.0, size=n)
    utility = rng.uniform(0.0, 1.0, size=n) if with_utility else None
    return ScoreTable(ppl, cot, utility)
