"""Subset-quality measures and comparison-table reporting.

The dispersion score sums 1 - S_ij over ordered pairs of the subset, so
every unordered pair counts twice; `diversity_score(S, A)` therefore equals
2x the unordered-pair sum for symmetric S. The combined objective is

    lam * sum_{x in A} U(x) + (1 - lam) * D(A)

Comparison records aggregate externally computed metrics (this module never
runs model inference) and render as a budget-by-method grid with 2-decimal
cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .formats import FormatError, fmt_float, significant_lines
from .model import ExampleRecord, ScoreTable, SimilarityMatrix, ValidationError, check_dense_ids

__all__ = [
    "ComparisonRecord",
    "CoverageStat",
    "diversity_score",
    "objective_value",
    "coverage_summary",
    "format_comparison",
    "load_results",
    "write_results",
]

UNTAGGED = "untagged"


def _subset_ids(ids: Iterable[int], n: int) -> list[int]:
    out = [int(i) for i in ids]
    if len(set(out)) != len(out):
        raise ValidationError("subset ids must be distinct")
    if out and (min(out) < 0 or max(out) >= n):
        raise ValidationError(f"subset ids must lie in 0..{n - 1}")
    return out


def diversity_score(S: SimilarityMatrix, ids: Iterable[int]) -> float:
    """Sum of (1 - S_ij) over ordered pairs i != j of the subset."""
    subset = _subset_ids(ids, S.n)
    if len(subset) <= 1:
        return 0.0
    block = S.values[np.ix_(subset, subset)]
    off_diagonal = np.sum(1.0 - block) - np.sum(1.0 - np.diag(block))
    return float(off_diagonal)


def objective_value(
    scores: ScoreTable,
    S: SimilarityMatrix,
    ids: Iterable[int],
    lam: float,
) -> float:
    """lam-weighted utility mass plus (1 - lam)-weighted dispersion."""
    if not (0.0 <= lam <= 1.0):
        raise ValidationError(f"lam must lie in [0, 1], got {lam}")
    utilities = scores.require_utility()
    if scores.n != S.n:
        raise ValidationError(f"score table ({scores.n}) and similarity ({S.n}) sizes differ")
    subset = _subset_ids(ids, S.n)
    return lam * float(utilities[subset].sum()) + (1.0 - lam) * diversity_score(S, subset)


@dataclass(frozen=True)
class CoverageStat:
    tag: str
    selected: int
    total: int

    @property
    def fraction(self) -> float:
        return self.selected / self.total if self.total else 0.0


def coverage_summary(
    records: Sequence[ExampleRecord],
    ids: Iterable[int],
) -> dict[str, CoverageStat]:
    """Per-subdomain counts inside the selection and the whole dataset."""
    check_dense_ids(records)
    by_id = {r.id: r for r in records}
    subset = set(_subset_ids(ids, len(records)))
    totals: dict[str, int] = {}
    picked: dict[str, int] = {}
    for record in records:
        tag = record.subdomain or UNTAGGED
        totals[tag] = totals.get(tag, 0) + 1
        if record.id in subset:
            picked[tag] = picked.get(tag, 0) + 1
    return {
        tag: CoverageStat(tag, picked.get(tag, 0), totals[tag]) for tag in sorted(totals)
    }


@dataclass(frozen=True)
class ComparisonRecord:
    """One externally measured result: a metric value for (method, budget)."""

    method: str
    budget: int
    metric_name: str
    metric_value: float

    def __post_init__(self) -> None:
        if self.budget <= 0:
            raise ValidationError(f"budget must be positive, got {self.budget}")
        for text, what in ((self.method, "method"), (self.metric_name, "metric name")):
            if not text or any(c.isspace() for c in text):
                raise ValidationError(f"{what} must be non-empty without spaces: {text!r}")
        if not np.isfinite(self.metric_value):
            raise ValidationError("metric value must be finite")


def format_comparison(records: Sequence[ComparisonRecord]) -> str:
    """Render records as one grid per metric: budgets ascending down the rows,
    methods across the columns in first-appearance order, 2-decimal cells."""
    if not records:
        raise ValidationError("no comparison records to format")
    seen: set[tuple[str, int, str]] = set()
    for rec in records:
        key = (rec.method, rec.budget, rec.metric_name)
        if key in seen:
            raise ValidationError(
                f"conflicting duplicate entry for method={rec.method} "
                f"budget={rec.budget} metric={rec.metric_name}"
            )
        seen.add(key)
    metrics: list[str] = []
    for rec in records:
        if rec.metric_name not in metrics:
            metrics.append(rec.metric_name)
    blocks = []
    for metric in metrics:
        group = [r for r in records if r.metric_name == metric]
        methods: list[str] = []
        for rec in group:
            if rec.method not in methods:
                methods.append(rec.method)
        budgets = sorted({r.budget for r in group})
        cells = {(r.budget, r.method): f"{r.metric_value:.2f}" for r in group}
        header = ["subset_size"] + methods
        rows = [[str(b)] + [cells.get((b, m), "-") for m in methods] for b in budgets]
        widths = [max(len(row[c]) for row in [header] + rows) for c in range(len(header))]
        lines = []
        if len(metrics) > 1:
            lines.append(f"metric: {metric}")
        for row in [header] + rows:
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


# -- results file: "RESULTS n" then "method budget metric value" rows --------


def load_results(path) -> list[ComparisonRecord]:
    lines = significant_lines(path)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise FormatError(path, None, "unexpected end of file, expected 'RESULTS' header")
    parts = header.split()
    if len(parts) != 2 or parts[0] != "RESULTS":
        raise FormatError(path, lineno, "malformed header, expected 'RESULTS n'")
    try:
        count = int(parts[1])
    except ValueError:
        raise FormatError(path, lineno, f"record count must be an integer, got {parts[1]!r}")
    records = []
    for lineno, text in lines:
        tokens = text.split()
        if len(tokens) != 4:
            raise FormatError(path, lineno, f"result rows read 'method budget metric value', got {len(tokens)} fields")
        try:
            record = ComparisonRecord(tokens[0], int(tokens[1]), tokens[2], float(tokens[3]))
        except (ValueError, ValidationError) as exc:
            raise FormatError(path, lineno, str(exc))
        records.append(record)
    if len(records) != count:
        raise FormatError(path, None, f"header declares {count} records, found {len(records)}")
    if not records:
        raise FormatError(path, None, "results file holds no records")
    return records


def write_results(records: Sequence[ComparisonRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"RESULTS {len(records)}\n")
        for rec in records:
            fh.write(f"{rec.method} {rec.budget} {rec.metric_name} {fmt_float(rec.metric_value)}\n")
