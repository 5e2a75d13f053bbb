"""Tab-delimited tables with a header row.

All experiment outputs go through these helpers so that identical inputs
produce byte-identical files: floats are rendered with ``repr`` (shortest
round-trip form) and newlines are always ``\\n``.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

__all__ = ["format_cell", "read_table", "sha256_of", "write_table"]


def format_cell(value) -> str:
    if isinstance(value, bool):
        raise TypeError("booleans are ambiguous in tables; use a string")
    if isinstance(value, float):
        # np.float64 passes this check but reprs as np.float64(...).
        return repr(float(value))
    return str(value)


def write_table(path, columns, rows) -> None:
    """Write one header row and one line per record, tab-separated."""
    lines = ["\t".join(columns)]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row width {len(row)} != header width {len(columns)}")
        lines.append("\t".join(format_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def read_table(path) -> tuple[list[str], list[list[str]]]:
    """Read a table written by :func:`write_table`; cells stay strings."""
    text = Path(path).read_text(encoding="ascii")
    lines = [line for line in text.split("\n") if line]
    if not lines:
        raise ValueError(f"{path}: empty table")
    header = lines[0].split("\t")
    rows = [line.split("\t") for line in lines[1:]]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"{path}: ragged row {row}")
    return header, rows


def sha256_of(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
