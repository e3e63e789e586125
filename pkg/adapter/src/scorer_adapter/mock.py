"""Deterministic mock model and encoder, plus identifier resolution.

The export pipeline only needs two behaviors:

    TokenProbModel.token_probs(prompt, answer, context=None) -> list[float]
        probability of each whitespace token of `answer`, optionally with a
        (context_prompt, context_answer) pair prepended in-context.

    TextEncoder.encode(texts) -> (n, dim) float array

The mock model assigns probabilities from a fixed cycling schedule, so every
expected value in the tests is computable by hand. Real models are a manual
path: implement the same two methods (e.g. with an HF causal LM and a
sentence encoder) and pass the instances to the export functions.

Mock identifiers:

    mock                    schedule (0.5, 0.25), context-insensitive
    mock:0.125              constant schedule
    mock:0.5,0.25+double    cycling schedule; conditioning doubles each
                            probability (capped at 1.0)

Encoder identifiers: `mock-<dim>`, e.g. `mock-16`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import AdapterError, ContextOverflowError, TokenizationError

IDENTITY = "identity"
DOUBLE = "double"
CONDITIONING_RULES = (IDENTITY, DOUBLE)


def tokenize(text: str) -> list[str]:
    return text.split()


@dataclass(frozen=True)
class MockModel:
    """Fixed per-token probability schedule, cycled over token positions."""

    schedule: tuple[float, ...] = (0.5, 0.25)
    conditioning: str = IDENTITY
    max_context_tokens: int | None = None

    def __post_init__(self) -> None:
        if not self.schedule:
            raise AdapterError("mock schedule must hold at least one probability")
        if any(p <= 0.0 or p > 1.0 for p in self.schedule):
            raise AdapterError("mock schedule probabilities must lie in (0, 1]")
        if self.conditioning not in CONDITIONING_RULES:
            raise AdapterError(f"unknown conditioning rule {self.conditioning!r}")

    def token_probs(
        self,
        prompt: str,
        answer: str,
        context: tuple[str, str] | None = None,
    ) -> list[float]:
        tokens = tokenize(answer)
        if not tokens:
            raise TokenizationError("answer produced no tokens")
        if context is not None and self.max_context_tokens is not None:
            used = len(tokenize(prompt)) + sum(len(tokenize(part)) for part in context)
            if used > self.max_context_tokens:
                raise ContextOverflowError(
                    f"context needs {used} tokens, window is {self.max_context_tokens}"
                )
        probs = [self.schedule[t % len(self.schedule)] for t in range(len(tokens))]
        if context is not None and self.conditioning == DOUBLE:
            probs = [min(2.0 * p, 1.0) for p in probs]
        return probs


class MockEncoder:
    """Hash-seeded Gaussian embeddings: deterministic, unit-normalized."""

    def __init__(self, dim: int = 16):
        if dim < 1:
            raise AdapterError(f"encoder dimension must be >= 1, got {dim}")
        self.dim = dim

    def encode(self, texts) -> np.ndarray:
        rows = np.empty((len(texts), self.dim))
        for i, text in enumerate(texts):
            digest = hashlib.sha256(text.encode("utf-8")).digest()
            rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest[:8], "big")))
            row = rng.normal(size=self.dim)
            norm = float(np.linalg.norm(row))
            rows[i] = row / norm if norm else np.eye(self.dim)[0]
        return rows


def resolve_model(identifier: str) -> MockModel:
    if identifier == "mock":
        return MockModel()
    if identifier.startswith("mock:"):
        body = identifier[len("mock:") :]
        conditioning = IDENTITY
        if "+" in body:
            body, conditioning = body.split("+", 1)
        try:
            schedule = tuple(float(tok) for tok in body.split(",") if tok)
        except ValueError:
            raise AdapterError(f"bad mock schedule in {identifier!r}")
        return MockModel(schedule=schedule, conditioning=conditioning)
    raise AdapterError(
        f"model {identifier!r} is not built in; implement token_probs() "
        "(see scorer_adapter.mock) and call the export functions directly"
    )


def resolve_encoder(identifier: str) -> MockEncoder:
    if identifier.startswith("mock-"):
        try:
            return MockEncoder(dim=int(identifier[len("mock-") :]))
        except ValueError:
            raise AdapterError(f"bad encoder dimension in {identifier!r}")
    raise AdapterError(
        f"encoder {identifier!r} is not built in; implement encode() "
        "(see scorer_adapter.mock) and call the export functions directly"
    )
