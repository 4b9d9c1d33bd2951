"""Plot-ready tabular datasets: tab-separated values plus a JSON metadata sidecar.

The data file holds a header row and numeric rows only, so a rerun with the
same seed reproduces it byte for byte; volatile fields (the timestamp) live in
the sidecar '<file>.meta.json'.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path


@dataclass
class Dataset:
    columns: list[str]
    rows: list[list]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def write(self, path: str | Path) -> Path:
        """Write the table to `path` and the metadata sidecar next to it."""
        path = Path(path)
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        lines = ["\t".join(self.columns)]
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row width {len(row)} does not match {len(self.columns)} columns")
            lines.append("\t".join(_format_cell(v) for v in row))
        path.write_text("\n".join(lines) + "\n")
        meta = dict(self.metadata)
        meta["columns"] = list(self.columns)
        meta["timestamp"] = datetime.now(timezone.utc).isoformat()
        sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return path

    @staticmethod
    def read(path: str | Path) -> "Dataset":
        path = Path(path)
        lines = path.read_text().splitlines()
        if not lines:
            raise ValueError(f"{path} is empty")
        columns = lines[0].split("\t")
        rows = [[_parse_cell(cell) for cell in line.split("\t")] for line in lines[1:] if line]
        metadata = {}
        sidecar = sidecar_path(path)
        if sidecar.exists():
            metadata = json.loads(sidecar.read_text())
        return Dataset(columns=columns, rows=rows, metadata=metadata)


def sidecar_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    if value == int(value) and abs(value) < 1e15:
        # keep exact integers readable ("45.0" not "45.000000000000001")
        return repr(value)
    return repr(value)


def _parse_cell(cell: str):
    try:
        return int(cell)
    except ValueError:
        return float(cell)
