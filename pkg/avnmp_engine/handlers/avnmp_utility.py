#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from ..models.hypothesis import TimedSample
from .exceptions import FormatError


def format_number(value: Any) -> Any:
    """Non-finite floats become the sentinel strings used in every output file."""
    if isinstance(value, float) and not math.isfinite(value):
        if math.isnan(value):
            return "nan"
        return "inf" if value > 0 else "-inf"
    return value


def parse_number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise FormatError(f"'{text}' is not a number") from None


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(cell) for cell in row])
    return path


def read_csv(path: str | Path) -> List[Dict[str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def json_line(record: Dict[str, Any]) -> str:
    return json.dumps(
        {key: format_number(value) for key, value in record.items()},
        sort_keys=True,
        separators=(",", ":"),
        allow_nan=False,
    )


def write_jsonl(path: str | Path, records: Iterable[Dict[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(json_line(record) + "\n")
    return path


def read_jsonl(path: str | Path) -> List[Dict[str, Any]]:
    with Path(path).open(encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def read_samples_csv(path: str | Path) -> List[TimedSample]:
    """Read a (time_s, value) series; fails on a missing column or a bad number."""
    rows = read_csv(path)
    samples: List[TimedSample] = []
    for line, row in enumerate(rows, start=2):
        if "time_s" not in row or "value" not in row:
            raise FormatError(f"{path}:{line}: expected columns time_s,value")
        samples.append(TimedSample(parse_number(row["time_s"]), parse_number(row["value"])))
    return samples


def write_samples_csv(path: str | Path, samples: Iterable[TimedSample]) -> Path:
    return write_csv(path, ("time_s", "value"), ((s.t, s.value) for s in samples))
