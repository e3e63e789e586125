"""Export pipeline: dataset -> SCORES / EMB / PAIRPROBS interchange files.

Per-example numbers follow the toolkit's definitions: perplexity is the
exponentiated mean negative log probability of the answer tokens, and the
reasoning loss is the mean token cross-entropy over the reasoning tokens
(recorded as a header comment in the score file). Floats are written with
17 significant digits so the toolkit reloads them exactly.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

from .dataset import DatasetExample, read_dataset
from .errors import AdapterError, ContextOverflowError, TokenizationError
from .mock import resolve_encoder, resolve_model

COT_LOSS_NOTE = "cot_loss = mean token cross-entropy over reasoning tokens"


@dataclass(frozen=True)
class AdapterConfig:
    model: str = "mock"
    encoder: str = "mock-16"
    dataset: str = ""
    max_pairs: int = 10_000
    device: str = "cpu"

    def __post_init__(self) -> None:
        if self.max_pairs < 0:
            raise AdapterError(f"max_pairs must be >= 0, got {self.max_pairs}")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _perplexity(probs: Sequence[float]) -> float:
    return math.exp(-sum(math.log(p) for p in probs) / len(probs))


def _mean_cross_entropy(probs: Sequence[float]) -> float:
    return -sum(math.log(p) for p in probs) / len(probs)


def _load(cfg: AdapterConfig, dataset) -> list[DatasetExample]:
    if dataset is not None:
        return list(dataset)
    if not cfg.dataset:
        raise AdapterError("no dataset configured")
    return read_dataset(cfg.dataset)


def export_scores(cfg: AdapterConfig, out_path, model=None, dataset=None) -> int:
    """Write a SCORES file; returns the number of rows."""
    model = model if model is not None else resolve_model(cfg.model)
    examples = _load(cfg, dataset)
    rows = []
    for ex in examples:
        try:
            answer_probs = model.token_probs(ex.prompt, ex.answer)
        except TokenizationError as exc:
            raise AdapterError(f"example {ex.id}: {exc}")
        ppl = _perplexity(answer_probs)
        if ex.reasoning.split():
            try:
                reasoning_probs = model.token_probs(ex.prompt, ex.reasoning)
            except TokenizationError as exc:
                raise AdapterError(f"example {ex.id}: {exc}")
            cot = _mean_cross_entropy(reasoning_probs)
        else:
            cot = 0.0
        rows.append((ex.id, ppl, cot))
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(f"# {COT_LOSS_NOTE}; model={cfg.model}\n")
        fh.write(f"SCORES {len(rows)}\n")
        for idx, ppl, cot in rows:
            fh.write(f"{idx} {_fmt(ppl)} {_fmt(cot)}\n")
    return len(rows)


def export_embeddings(cfg: AdapterConfig, out_path, encoder=None, dataset=None) -> int:
    """Write an EMB file with one L2-normalized row per example."""
    encoder = encoder if encoder is not None else resolve_encoder(cfg.encoder)
    examples = _load(cfg, dataset)
    texts = [f"{ex.prompt} {ex.answer}".strip() for ex in examples]
    if texts:
        values = encoder.encode(texts)
        if values.shape[0] != len(texts):
            raise AdapterError(f"encoder returned {values.shape[0]} rows for {len(texts)} texts")
        norms = (values**2).sum(axis=1) ** 0.5
        if (norms == 0.0).any():
            raise AdapterError("encoder produced a zero embedding")
        values = values / norms[:, None]
        dim = values.shape[1]
    else:
        dim = getattr(encoder, "dim", 1)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(f"# encoder={cfg.encoder}, rows L2-normalized\n")
        fh.write(f"EMB {len(texts)} {dim}\n")
        for i in range(len(texts)):
            fh.write(" ".join(_fmt(x) for x in values[i]) + "\n")
    return len(texts)


def export_pairwise_probs(
    cfg: AdapterConfig,
    pairs: Sequence[tuple[int, int]],
    out_path,
    model=None,
    dataset=None,
) -> int:
    """Write a PAIRPROBS file for the requested (i, j) pairs.

    For each pair, the base line holds the probability of every answer token
    of example i given its own prompt; the conditional line holds the same
    tokens with example j prepended in-context. Pairs that exceed the model's
    context window are skipped with a notice on stderr.
    """
    model = model if model is not None else resolve_model(cfg.model)
    examples = _load(cfg, dataset)
    if len(pairs) > cfg.max_pairs:
        raise AdapterError(f"{len(pairs)} pairs requested, cap is max_pairs={cfg.max_pairs}")
    by_id = {ex.id: ex for ex in examples}
    records = []
    for i, j in pairs:
        if i not in by_id or j not in by_id:
            raise AdapterError(f"pair ({i}, {j}) references an unknown example id")
        target, context = by_id[i], by_id[j]
        try:
            base = model.token_probs(target.prompt, target.answer)
            cond = model.token_probs(
                target.prompt, target.answer, context=(context.prompt, context.answer)
            )
        except ContextOverflowError as exc:
            print(f"scorer-adapter: skipping pair ({i}, {j}): {exc}", file=sys.stderr)
            continue
        except TokenizationError as exc:
            raise AdapterError(f"pair ({i}, {j}): {exc}")
        if len(base) != len(cond):
            raise AdapterError(f"pair ({i}, {j}): base/cond token counts differ")
        records.append((i, j, base, cond))
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(f"PAIRPROBS {len(records)}\n")
        for i, j, base, cond in records:
            fh.write(f"{i} {j} {len(base)}\n")
            fh.write(" ".join(_fmt(p) for p in base) + "\n")
            fh.write(" ".join(_fmt(p) for p in cond) + "\n")
    return len(records)
