"""Tabular output: tab-delimited text and JSON, with a reader for both.

Every float is rendered with 10 significant digits in both formats, so
switching format never changes a value beyond representation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

FORMATS = ("tsv", "json")


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
        return f"{value:.10g}"
    return str(value)


def parse_value(text: str) -> Any:
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _json_value(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, int):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return format_value(value)
        return float(format_value(value))
    return str(value)


@dataclass
class Table:
    command: str
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    def add(self, *row: Any) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, table has {len(self.columns)} columns")
        self.rows.append(list(row))

    def column(self, name: str) -> list[Any]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def render(self, fmt: str = "tsv") -> str:
        if fmt == "tsv":
            return self.to_tsv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")

    def to_tsv(self) -> str:
        lines = [f"# command = {self.command}"]
        lines += [f"# {k} = {format_value(v)}" for k, v in self.metadata.items()]
        lines.append("\t".join(self.columns))
        lines += ["\t".join(format_value(c) for c in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "metadata": {k: _json_value(v) for k, v in self.metadata.items()},
            "columns": self.columns,
            "rows": [[_json_value(c) for c in row] for row in self.rows],
        }
        return json.dumps(doc, indent=1) + "\n"


def read_table(text: str) -> Table:
    """Parse output of :meth:`Table.render` in either format."""
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        rows = [[parse_value(c) if isinstance(c, str) else c for c in row] for row in doc["rows"]]
        meta = {k: parse_value(v) if isinstance(v, str) else v for k, v in doc["metadata"].items()}
        return Table(doc["command"], list(doc["columns"]), rows, meta)
    command = ""
    meta: dict[str, Any] = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        key, _, value = lines[i][1:].strip().partition(" = ")
        if key == "command":
            command = value
        else:
            meta[key] = parse_value(value)
        i += 1
    if i >= len(lines):
        raise ValueError("table has no header row")
    columns = lines[i].split("\t")
    rows = [[parse_value(c) for c in line.split("\t")] for line in lines[i + 1 :] if line]
    return Table(command, columns, rows, meta)
