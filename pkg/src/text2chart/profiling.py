"""Per-column description facts: canonical dtype names and, for
low-cardinality text columns, the distinct values to enumerate.

Only three dtype names exist: ``int64``, ``float64`` and ``object``.
A column of all integers is int64; all-numeric with at least one real is
float64; anything else (text, booleans, mixed kinds, all-null) is object.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ingest import ColumnData, TableFrame, render_cell

INT64 = "int64"
FLOAT64 = "float64"
OBJECT = "object"

DTYPE_NAMES = (INT64, FLOAT64, OBJECT)

DEFAULT_CATEGORICAL_THRESHOLD = 20


@dataclass(frozen=True)
class ColumnProfile:
    name: str
    dtype: str
    categorical_values: Optional[tuple[str, ...]] = None


@dataclass(frozen=True)
class SchemaProfile:
    frame_name: str
    columns: tuple[ColumnProfile, ...]
    row_count: int


def infer_dtype(column: ColumnData) -> str:
    """Map a column to one of the three canonical dtype names.

    Nulls are ignored; booleans count as object (there is no boolean name).
    """
    saw_int = False
    saw_real = False
    for cell in column.cells:
        if cell is None:
            continue
        if isinstance(cell, bool):
            return OBJECT
        if isinstance(cell, int):
            saw_int = True
        elif isinstance(cell, float):
            saw_real = True
        else:
            return OBJECT
    if saw_real:
        return FLOAT64
    if saw_int:
        return INT64
    return OBJECT


def distinct_values(column: ColumnData) -> list[str]:
    """Distinct non-null values as text, in first-appearance order."""
    return list(
        dict.fromkeys(
            render_cell(cell) for cell in column.cells if cell is not None
        )
    )


def profile_table(
    frame: TableFrame,
    threshold: int = DEFAULT_CATEGORICAL_THRESHOLD,
) -> SchemaProfile:
    """Profile every column, preserving source order.

    An object column is deemed categorical when it has fewer than
    ``threshold`` distinct non-null values (strictly fewer), in which case the
    values are enumerated. An empty enumeration is suppressed: it would add
    no context.
    """
    if threshold < 1:
        raise ValueError("threshold must be positive")
    profiles = []
    for column in frame.columns:
        dtype = infer_dtype(column)
        values: Optional[tuple[str, ...]] = None
        if dtype == OBJECT:
            distinct = distinct_values(column)
            if 0 < len(distinct) < threshold:
                values = tuple(distinct)
        profiles.append(ColumnProfile(column.name, dtype, values))
    return SchemaProfile(
        frame_name=frame.name,
        columns=tuple(profiles),
        row_count=frame.row_count,
    )
