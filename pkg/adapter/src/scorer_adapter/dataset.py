"""Dataset input: one record per line, fields separated by `|||`.

    id ||| prompt ||| answer ||| reasoning

ids must be unique and cover 0..n-1; blank lines and `#` comments are
skipped.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AdapterError

SEPARATOR = "|||"


@dataclass(frozen=True)
class DatasetExample:
    id: int
    prompt: str
    answer: str
    reasoning: str


def read_dataset(path) -> list[DatasetExample]:
    examples: list[DatasetExample] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text or text.startswith("#"):
                continue
            fields = [f.strip() for f in text.split(SEPARATOR)]
            if len(fields) != 4:
                raise AdapterError(f"{path}:{lineno}: expected 4 '|||'-separated fields, got {len(fields)}")
            try:
                idx = int(fields[0])
            except ValueError:
                raise AdapterError(f"{path}:{lineno}: id must be an integer, got {fields[0]!r}")
            examples.append(DatasetExample(idx, fields[1], fields[2], fields[3]))
    ids = sorted(e.id for e in examples)
    if ids != list(range(len(ids))):
        raise AdapterError(f"{path}: example ids must be unique and cover 0..{len(ids) - 1}")
    examples.sort(key=lambda e: e.id)
    return examples
