"""Load CSV files and SQLite tables into in-memory frames.

Cells are plain Python values: ``int``, ``float``, ``str``, ``bool`` or
``None``. Kind mixing within a column is allowed here; the profiler decides
what a column "is". Frames are immutable after load and safe to share across
threads.
"""

from __future__ import annotations

import csv
import io
import re
import sqlite3
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Union

from .errors import (
    DatasetNotFound,
    DuplicateColumn,
    EmptyInput,
    InvalidFrame,
    NotADatabase,
    RaggedRows,
    UnreadableFile,
)

Cell = Union[int, float, str, bool, None]

_INT_RE = re.compile(r"^[+-]?\d+$")
_REAL_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class ColumnData:
    name: str
    cells: tuple[Cell, ...]


@dataclass(frozen=True)
class TableFrame:
    name: str
    columns: tuple[ColumnData, ...]
    row_count: int

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for col in self.columns:
            if not col.name:
                raise InvalidFrame("column names must be non-empty")
            if col.name in seen:
                raise InvalidFrame(f"duplicate column name {col.name!r}")
            seen.add(col.name)
            if len(col.cells) != self.row_count:
                raise InvalidFrame(
                    f"column {col.name!r} has {len(col.cells)} cells, "
                    f"expected {self.row_count}"
                )

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> ColumnData:
        for col in self.columns:
            if col.name == name:
                return col
        raise KeyError(name)


def _parse_cell(text: str) -> Cell:
    if text == "":
        return None
    if _INT_RE.match(text):
        return int(text)
    if _REAL_RE.match(text):
        return float(text)
    if text.lower() == "true":
        return True
    if text.lower() == "false":
        return False
    return text


def render_cell(value: Cell) -> str:
    """Canonical text form; ``load_csv`` parses it back to the same cell."""
    if value is None:
        return ""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def load_csv(data: bytes, name: str) -> TableFrame:
    """Parse UTF-8 CSV bytes (comma delimiter, double-quote quoting).

    Numeric-looking cells become int/float, "true"/"false" become booleans,
    empty cells become None, everything else stays text. Blank lines are
    skipped.
    """
    text = data.decode("utf-8")
    reader = csv.reader(io.StringIO(text, newline=""))
    rows = [row for row in reader if row != []]
    if not rows:
        raise EmptyInput(f"{name}: no header row")
    header = rows[0]
    seen: set[str] = set()
    for col_name in header:
        if col_name in seen:
            raise DuplicateColumn(f"{name}: duplicate column {col_name!r}")
        seen.add(col_name)
    cells_by_col: list[list[Cell]] = [[] for _ in header]
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise RaggedRows(
                f"{name}: row {line_no} has {len(row)} cells, "
                f"header has {len(header)}"
            )
        for i, raw in enumerate(row):
            cells_by_col[i].append(_parse_cell(raw))
    columns = tuple(
        ColumnData(col_name, tuple(cells))
        for col_name, cells in zip(header, cells_by_col)
    )
    return TableFrame(name=name, columns=columns, row_count=len(rows) - 1)


def to_csv_bytes(frame: TableFrame) -> bytes:
    """Serialize back to CSV; reloading yields an identical frame."""
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(frame.column_names)
    for i in range(frame.row_count):
        writer.writerow([render_cell(col.cells[i]) for col in frame.columns])
    return buf.getvalue().encode("utf-8")


def _sqlite_cell(value: object) -> Cell:
    if value is None or isinstance(value, (int, float, str)):
        return value
    if isinstance(value, bytes):
        return value.decode("utf-8", "replace")
    return str(value)


def load_sqlite(path: str | Path) -> list[TableFrame]:
    """Load every user table of a SQLite database, opened read-only."""
    path = Path(path)
    if not path.is_file():
        raise UnreadableFile(f"not a readable file: {path}")
    try:
        conn = sqlite3.connect(f"file:{path}?mode=ro", uri=True)
    except sqlite3.Error as exc:
        raise UnreadableFile(f"cannot open {path}: {exc}") from exc
    try:
        try:
            names = [
                row[0]
                for row in conn.execute(
                    "SELECT name FROM sqlite_master WHERE type='table' "
                    "AND name NOT LIKE 'sqlite_%'"
                )
            ]
        except sqlite3.DatabaseError as exc:
            raise NotADatabase(f"{path}: {exc}") from exc
        frames = []
        for table in names:
            quoted = table.replace('"', '""')
            col_names = [
                row[1] for row in conn.execute(f'PRAGMA table_info("{quoted}")')
            ]
            rows = conn.execute(f'SELECT * FROM "{quoted}"').fetchall()
            columns = tuple(
                ColumnData(
                    col_name,
                    tuple(_sqlite_cell(row[i]) for row in rows),
                )
                for i, col_name in enumerate(col_names)
            )
            frames.append(
                TableFrame(name=table, columns=columns, row_count=len(rows))
            )
        return frames
    finally:
        conn.close()


@dataclass(frozen=True)
class SourceMeta:
    origin_kind: str  # csv | sqlite | builtin
    origin_name: str
    loaded_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc)
    )


class DatasetRegistry:
    """Session-scoped dataset store. Reads are lock-free on a snapshot;
    writes are serialized."""

    def __init__(self) -> None:
        self._entries: dict[str, tuple[TableFrame, SourceMeta]] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def register(self, frame: TableFrame, meta: SourceMeta) -> str:
        with self._lock:
            self._counter += 1
            dataset_id = f"ds-{self._counter:04d}"
            self._entries[dataset_id] = (frame, meta)
        return dataset_id

    def get(self, dataset_id: str) -> tuple[TableFrame, SourceMeta]:
        try:
            return self._entries[dataset_id]
        except KeyError:
            raise DatasetNotFound(dataset_id) from None

    def list_ids(self) -> list[str]:
        return list(self._entries)

    def __len__(self) -> int:
        return len(self._entries)
