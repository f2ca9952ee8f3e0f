"""Result tables written by the CLI (CSV or JSON)."""
import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
from pydantic import BaseModel, Field, model_validator


def _plain(value: Any) -> Any:
    """numpy scalars to Python scalars."""
    if isinstance(value, np.generic):
        return value.item()
    return value


def _csv_cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)  # shortest round-trip form, always '.' decimal point
    return str(value)


def _json_cell(value: Any) -> Any:
    value = _plain(value)
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ResultTable(BaseModel):
    """
    One named table of results plus the provenance of the run that made it.

    CSV layout: one `# {"table", "provenance"}` comment line, then a header
    row, then data rows. Provenance stays nested so its keys never shadow
    the table name. JSON layout: {"table", "provenance",
    "columns", "rows"} with rows as objects keyed by column name.
    """

    name: str
    columns: List[str]
    rows: List[List[Any]] = Field(default_factory=list)
    provenance: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_rows(self) -> "ResultTable":
        for i, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValueError(f"row {i} has {len(row)} cells, expected {len(self.columns)}")
        return self

    def add_row(self, *values: Any) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"expected {len(self.columns)} values, got {len(values)}")
        self.rows.append(list(values))

    def column(self, name: str) -> List[Any]:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def payload(self) -> str:
        """Numeric payload only (header and rows, no provenance)."""
        return self._render_csv(include_provenance=False)

    def render(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self._render_csv(include_provenance=True)
        if fmt == "json":
            document = {
                "table": self.name,
                "provenance": self.provenance,
                "columns": self.columns,
                "rows": [
                    {col: _json_cell(v) for col, v in zip(self.columns, row)}
                    for row in self.rows
                ],
            }
            return json.dumps(document, indent=2) + "\n"
        raise ValueError(f"unknown format {fmt!r}")

    def _render_csv(self, include_provenance: bool) -> str:
        buffer = io.StringIO()
        if include_provenance:
            buffer.write("# " + json.dumps({"table": self.name, "provenance": self.provenance}) + "\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_csv_cell(v) for v in row])
        return buffer.getvalue()

    def save(self, path: Path, fmt: str = "csv") -> str:
        """Write the table; returns the rendered text."""
        text = self.render(fmt)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            f.write(text)
        return text

    @classmethod
    def load_csv(cls, path: Path) -> "ResultTable":
        """Read back a CSV written by `save`; cells stay strings."""
        with open(path, newline="") as f:
            lines = f.read().splitlines()
        header: Dict[str, Any] = {}
        if lines and lines[0].startswith("# "):
            header = json.loads(lines.pop(0)[2:])
        reader = csv.reader(lines)
        columns = next(reader)
        return cls(
            name=str(header.get("table", path.stem)),
            columns=columns,
            rows=[row for row in reader],
            provenance=header.get("provenance", {}),
        )
