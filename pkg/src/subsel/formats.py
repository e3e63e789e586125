"""Line-oriented interchange files.

Each format starts with a one-line typed header. Blank lines and lines
starting with `#` are ignored everywhere, so producers may annotate files.
Numbers are written with 17 significant digits, which round-trips float64
exactly. Loader diagnostics always carry the path and physical line number.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

from .model import (
    EmbeddingMatrix,
    ParamValue,
    ScoreTable,
    SelectionResult,
    TokenProbRecord,
)

__all__ = [
    "FormatError",
    "fmt_float",
    "load_embeddings",
    "write_embeddings",
    "load_scores",
    "write_scores",
    "load_token_probs",
    "write_token_probs",
    "load_selection",
    "write_selection",
]

EMPTY_PARAMS_MARK = "-"


class FormatError(ValueError):
    """Malformed interchange file; message carries `path:line`."""

    def __init__(self, path, lineno: int | None, message: str):
        self.path = str(path)
        self.lineno = lineno
        where = self.path if lineno is None else f"{self.path}:{lineno}"
        super().__init__(f"{where}: {message}")


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def significant_lines(path) -> Iterator[tuple[int, str]]:
    """Yield (physical line number, stripped text), skipping blanks and comments."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            yield lineno, text


class _LineReader:
    def __init__(self, path):
        self.path = path
        self._it = significant_lines(path)
        self.lineno = 0

    def next(self, what: str) -> str:
        try:
            self.lineno, text = next(self._it)
        except StopIteration:
            raise FormatError(self.path, None, f"unexpected end of file, expected {what}")
        return text

    def try_next(self) -> str | None:
        try:
            self.lineno, text = next(self._it)
        except StopIteration:
            return None
        return text

    def expect_end(self) -> None:
        try:
            lineno, _ = next(self._it)
        except StopIteration:
            return
        raise FormatError(self.path, lineno, "trailing content after declared records")

    def fail(self, message: str):
        raise FormatError(self.path, self.lineno, message)


def _parse_int(reader: _LineReader, token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        reader.fail(f"{what} must be an integer, got {token!r}")


def _parse_float(reader: _LineReader, token: str, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        reader.fail(f"{what} must be a number, got {token!r}")
    if not np.isfinite(value):
        reader.fail(f"{what} must be finite, got {token!r}")
    return value


def _header(reader: _LineReader, tag: str, n_fields: int) -> list[str]:
    text = reader.next(f"'{tag}' header")
    parts = text.split()
    if len(parts) != 1 + n_fields or parts[0] != tag:
        reader.fail(f"malformed header, expected '{tag}' followed by {n_fields} field(s)")
    return parts[1:]


# -- embeddings: "EMB n d" then n rows of d reals ---------------------------


def load_embeddings(path) -> EmbeddingMatrix:
    reader = _LineReader(path)
    n_tok, d_tok = _header(reader, "EMB", 2)
    n = _parse_int(reader, n_tok, "example count")
    d = _parse_int(reader, d_tok, "embedding dimension")
    if n < 0 or d < 1:
        reader.fail(f"invalid embedding shape {n} x {d}")
    values = np.empty((n, d), dtype=np.float64)
    for i in range(n):
        tokens = reader.next(f"embedding row {i}").split()
        if len(tokens) != d:
            reader.fail(f"row {i} has {len(tokens)} values, expected d={d}")
        row = np.array([_parse_float(reader, t, f"row {i} entry") for t in tokens])
        if not np.any(row != 0.0):
            reader.fail(f"row {i} is all zeros")
        values[i] = row
    reader.expect_end()
    return EmbeddingMatrix(values)


def write_embeddings(emb: EmbeddingMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"EMB {emb.n} {emb.d}\n")
        for row in emb.values:
            fh.write(" ".join(fmt_float(x) for x in row) + "\n")


# -- scores: "SCORES n" then "id ppl cot_loss [utility]" rows ---------------


def load_scores(path) -> ScoreTable:
    reader = _LineReader(path)
    (n_tok,) = _header(reader, "SCORES", 1)
    n = _parse_int(reader, n_tok, "example count")
    if n < 0:
        reader.fail(f"invalid example count {n}")
    ppl = np.empty(n)
    cot = np.empty(n)
    util = np.empty(n)
    has_util: bool | None = None
    seen = np.zeros(n, dtype=bool)
    for _ in range(n):
        tokens = reader.next("score row").split()
        if len(tokens) not in (3, 4):
            reader.fail(f"score rows have 3 or 4 fields, got {len(tokens)}")
        row_has_util = len(tokens) == 4
        if has_util is None:
            has_util = row_has_util
        elif has_util != row_has_util:
            reader.fail("utility column must be present on all rows or none")
        idx = _parse_int(reader, tokens[0], "id")
        if idx < 0 or idx >= n:
            reader.fail(f"id {idx} outside 0..{n - 1}")
        if seen[idx]:
            reader.fail(f"duplicate id {idx}")
        seen[idx] = True
        ppl_v = _parse_float(reader, tokens[1], f"ppl for id {idx}")
        if ppl_v < 1.0:
            reader.fail(f"ppl for id {idx} must be >= 1, got {tokens[1]}")
        cot_v = _parse_float(reader, tokens[2], f"cot_loss for id {idx}")
        if cot_v < 0.0:
            reader.fail(f"cot_loss for id {idx} must be >= 0, got {tokens[2]}")
        ppl[idx], cot[idx] = ppl_v, cot_v
        if row_has_util:
            u = _parse_float(reader, tokens[3], f"utility for id {idx}")
            if u < 0.0 or u > 1.0:
                reader.fail(f"utility for id {idx} must lie in [0, 1], got {tokens[3]}")
            util[idx] = u
    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        raise FormatError(path, None, f"missing row for id {missing}")
    reader.expect_end()
    return ScoreTable(ppl, cot, util if (has_util and n) else None)


def write_scores(table: ScoreTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"SCORES {table.n}\n")
        for i in range(table.n):
            fields = [str(i), fmt_float(table.ppl[i]), fmt_float(table.cot_loss[i])]
            if table.utility is not None:
                fields.append(fmt_float(table.utility[i]))
            fh.write(" ".join(fields) + "\n")


# -- token probabilities: "PAIRPROBS count" then 3 lines per record ---------


def load_token_probs(path) -> list[TokenProbRecord]:
    reader = _LineReader(path)
    (count_tok,) = _header(reader, "PAIRPROBS", 1)
    count = _parse_int(reader, count_tok, "record count")
    if count < 0:
        reader.fail(f"invalid record count {count}")
    records = []
    for r in range(count):
        tokens = reader.next(f"record {r} id line").split()
        if len(tokens) != 3:
            reader.fail(f"record {r} id line must read 'i j T', got {len(tokens)} fields")
        i = _parse_int(reader, tokens[0], "id i")
        j = _parse_int(reader, tokens[1], "id j")
        t = _parse_int(reader, tokens[2], "token count T")
        if t < 1:
            reader.fail(f"record {r} token count must be >= 1, got {t}")
        rows = []
        for name in ("base", "cond"):
            toks = reader.next(f"record {r} {name} probabilities").split()
            if len(toks) != t:
                reader.fail(f"record {r} {name} line has {len(toks)} values, expected T={t}")
            probs = [_parse_float(reader, tok, f"{name} probability") for tok in toks]
            for p in probs:
                if p <= 0.0 or p > 1.0:
                    reader.fail(f"record {r} {name} probability {p!r} outside (0, 1]")
            rows.append(probs)
        records.append(TokenProbRecord(i, j, rows[0], rows[1]))
    reader.expect_end()
    return records


def write_token_probs(records: Sequence[TokenProbRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"PAIRPROBS {len(records)}\n")
        for rec in records:
            fh.write(f"{rec.i} {rec.j} {rec.length}\n")
            fh.write(" ".join(fmt_float(p) for p in rec.base_probs) + "\n")
            fh.write(" ".join(fmt_float(p) for p in rec.cond_probs) + "\n")


# -- selections: "SELECTION method B objective", params line, id/gain rows --


def _encode_param(value: ParamValue) -> str:
    if isinstance(value, bool):
        raise ValueError("boolean selection params are not supported")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return fmt_float(value)
    return value


def _decode_param(text: str) -> ParamValue:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        return text
    return value if np.isfinite(value) else text


def load_selection(path) -> SelectionResult:
    reader = _LineReader(path)
    method, b_tok, obj_tok = _header(reader, "SELECTION", 3)
    budget = _parse_int(reader, b_tok, "budget")
    objective = _parse_float(reader, obj_tok, "objective")
    params_text = reader.next("params line")
    params: dict[str, ParamValue] = {}
    if params_text != EMPTY_PARAMS_MARK:
        for item in params_text.split():
            key, sep, value = item.partition("=")
            if not sep or not key or not value:
                reader.fail(f"params must be key=value pairs, got {item!r}")
            if key in params:
                reader.fail(f"duplicate param {key!r}")
            params[key] = _decode_param(value)
    selected = []
    gains = []
    for _ in range(budget):
        text = reader.try_next()
        if text is None:
            break
        tokens = text.split()
        if len(tokens) != 2:
            reader.fail(f"selection rows read 'id gain', got {len(tokens)} fields")
        selected.append(_parse_int(reader, tokens[0], "selected id"))
        gains.append(_parse_float(reader, tokens[1], "gain"))
    reader.expect_end()
    return SelectionResult(method, budget, tuple(selected), tuple(gains), objective, params)


def write_selection(result: SelectionResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"SELECTION {result.method} {result.budget} {fmt_float(result.objective)}\n")
        if result.params:
            items = " ".join(f"{k}={_encode_param(v)}" for k, v in result.params.items())
            fh.write(items + "\n")
        else:
            fh.write(EMPTY_PARAMS_MARK + "\n")
        for idx, gain in zip(result.selected, result.gains):
            fh.write(f"{idx} {fmt_float(gain)}\n")
