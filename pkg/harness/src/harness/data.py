"""Readers for graphlin's JSONL stream, manifest, and structure-row formats.

The harness never parses or manipulates graphs itself; everything arrives
pre-linearized in these files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator


class StreamFormatError(Exception):
    """A stream record or batch violates the documented format."""


@dataclass(frozen=True)
class Record:
    id: str
    task: str
    input: tuple[str, ...]
    target: tuple[str, ...]


def split_tokens(text: str) -> list[str]:
    """Whitespace split that keeps quoted literals (e.g. "New York") whole."""
    tokens: list[str] = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        if text[i] == '"':
            j = i + 1
            while j < n and (text[j] != '"' or text[j - 1] == "\\"):
                j += 1
            j = min(j + 1, n)
            tokens.append(text[i:j])
            i = j
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        tokens.append(text[i:j])
        i = j
    return tokens


def read_records(path: str | Path) -> list[Record]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            raw = json.loads(line)
            try:
                records.append(
                    Record(
                        id=raw["id"],
                        task=raw["task"],
                        input=tuple(split_tokens(raw["input"])),
                        target=tuple(split_tokens(raw["target"])),
                    )
                )
            except KeyError as exc:
                raise StreamFormatError(f"{path}:{line_no}: missing field {exc}") from exc
    return records


def read_manifest(stream_path: str | Path) -> dict:
    manifest_path = Path(str(stream_path) + ".manifest.json")
    if not manifest_path.exists():
        raise StreamFormatError(f"no manifest next to {stream_path}")
    return json.loads(manifest_path.read_text(encoding="utf-8"))


def read_batches(stream_path: str | Path) -> Iterator[list[Record]]:
    """Yield batches exactly as emitted: consecutive, homogeneous groups."""
    manifest = read_manifest(stream_path)
    batch_size = manifest["stats"]["batch_size"]
    records = read_records(stream_path)
    for start in range(0, len(records), batch_size):
        batch = records[start : start + batch_size]
        tasks = {r.task for r in batch}
        if len(tasks) != 1:
            raise StreamFormatError(f"batch at record {start} mixes tasks: {sorted(tasks)}")
        yield batch


def read_structure_rows(path: str | Path) -> dict[str, dict]:
    """Per-example rows from `graphlin stats --per-example` keyed by id."""
    rows: dict[str, dict] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                row = json.loads(line)
                rows[row["id"]] = row
    return rows
