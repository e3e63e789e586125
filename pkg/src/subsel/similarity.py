"""Cosine similarity matrices and the kernel transforms applied before
coverage-style selection.

The matrix is assembled from its strict upper triangle and mirrored, so
symmetry holds exactly (bit for bit), not just within tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formats import FormatError, fmt_float, significant_lines
from .model import EmbeddingMatrix, SimilarityMatrix, ValidationError

__all__ = [
    "KERNEL_MODES",
    "KernelTransform",
    "cosine_similarity_matrix",
    "apply_transform",
    "load_similarity",
    "write_similarity",
]

RAW = "raw"
CLIP_AT_ZERO = "clip-at-zero"
SHIFT_TO_UNIT = "shift-to-unit"
KERNEL_MODES = (RAW, CLIP_AT_ZERO, SHIFT_TO_UNIT)


@dataclass(frozen=True)
class KernelTransform:
    """Entrywise map onto a non-negative kernel.

    clip-at-zero keeps unrelated pairs at similarity 0; shift-to-unit maps
    [-1, 1] affinely onto [0, 1]. Both land in [0, 1] and fix the unit
    diagonal.
    """

    mode: str = RAW

    def __post_init__(self) -> None:
        if self.mode not in KERNEL_MODES:
            raise ValidationError(f"unknown kernel transform {self.mode!r}, expected one of {KERNEL_MODES}")


def cosine_similarity_matrix(emb: EmbeddingMatrix) -> SimilarityMatrix:
    """S[i, j] = <e_i, e_j> / (|e_i| |e_j|), exactly symmetric, unit diagonal."""
    values = emb.values
    norms = np.linalg.norm(values, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValidationError(f"embedding row {int(zero[0])} has zero norm")
    unit = values / norms[:, None]
    gram = unit @ unit.T
    upper = np.triu(gram, k=1)
    sim = upper + upper.T
    np.clip(sim, -1.0, 1.0, out=sim)
    np.fill_diagonal(sim, 1.0)
    return SimilarityMatrix(sim)


def apply_transform(sim: SimilarityMatrix, transform: KernelTransform) -> SimilarityMatrix:
    if transform.mode == RAW:
        return sim
    if transform.mode == CLIP_AT_ZERO:
        return SimilarityMatrix(np.maximum(sim.values, 0.0))
    return SimilarityMatrix((sim.values + 1.0) / 2.0)


# -- cache file: "SIM n" then rows of the upper triangle (diagonal included) --


def write_similarity(sim: SimilarityMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"SIM {sim.n}\n")
        for i in range(sim.n):
            fh.write(" ".join(fmt_float(x) for x in sim.values[i, i:]) + "\n")


def load_similarity(path) -> SimilarityMatrix:
    lines = significant_lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise FormatError(path, None, "unexpected end of file, expected 'SIM' header")
    parts = header.split()
    if len(parts) != 2 or parts[0] != "SIM":
        raise FormatError(path, lineno, "malformed header, expected 'SIM n'")
    try:
        n = int(parts[1])
    except ValueError:
        raise FormatError(path, lineno, f"size must be an integer, got {parts[1]!r}")
    if n < 0:
        raise FormatError(path, lineno, f"invalid size {n}")
    values = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        try:
            lineno, text = next(lines)
        except StopIteration:
            raise FormatError(path, None, f"unexpected end of file, expected triangle row {i}")
        tokens = text.split()
        if len(tokens) != n - i:
            raise FormatError(path, lineno, f"triangle row {i} has {len(tokens)} values, expected {n - i}")
        try:
            row = np.array([float(t) for t in tokens])
        except ValueError:
            raise FormatError(path, lineno, f"triangle row {i} contains a non-numeric value")
        if not np.isfinite(row).all():
            raise FormatError(path, lineno, f"triangle row {i} contains a non-finite value")
        values[i, i:] = row
        values[i:, i] = row
    for lineno, _ in lines:
        raise FormatError(path, lineno, "trailing content after declared rows")
    try:
        return SimilarityMatrix(values)
    except ValidationError as exc:
        raise FormatError(path, None, str(exc))
