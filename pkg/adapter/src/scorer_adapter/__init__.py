"""Score, embedding, and token-probability export for the subsel toolkit.

The adapter turns a dataset of prompt/answer/reasoning records into the
line-oriented interchange files the selection toolkit consumes. A
deterministic mock model backs the test suite; wiring a real model means
implementing the two small protocols in `mock.py` (per-token probabilities
and text encoding) and calling the export functions directly.
"""

__version__ = "0.1.0"

from .dataset import DatasetExample, read_dataset
from .errors import AdapterError, ContextOverflowError, TokenizationError
from .export import (
    AdapterConfig,
    export_embeddings,
    export_pairwise_probs,
    export_scores,
)
from .mock import MockEncoder, MockModel, resolve_encoder, resolve_model
