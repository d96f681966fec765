"""Rectangular result tables with CSV/JSON serialization.

Every serialized table embeds its metadata block (seed, version, timestamp,
resolved configuration) so runs are reproducible from the output file alone.
Numeric content is deterministic; the timestamp is excluded from any
determinism guarantee.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

__all__ = ["SweepTable", "format_scalar"]


def format_scalar(value) -> str:
    """Render a cell: floats at 17 significant digits, everything else as str."""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


@dataclass
class SweepTable:
    columns: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("ragged row in sweep table")
        self.metadata.setdefault("timestamp", datetime.now(timezone.utc).isoformat())

    def to_csv(self) -> str:
        lines = [f"# {key}={value}" for key, value in sorted(self.metadata.items())]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(format_scalar(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "metadata": self.metadata,
            "columns": self.columns,
            "rows": [list(row) for row in self.rows],
        }
        return json.dumps(payload, indent=2, default=format_scalar) + "\n"

    def dump(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]
