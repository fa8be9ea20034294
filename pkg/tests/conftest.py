from __future__ import annotations

import random
import sqlite3
import string
from pathlib import Path

import pytest

from text2chart import TableFrame, ColumnData, load_csv

_ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE_RESULTS[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _ACCEPTANCE_RESULTS.items():
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"  {status}  {name}")

REPO_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = REPO_ROOT / "data"
FIXTURES_DIR = REPO_ROOT / "fixtures"
PROMPTS_DIR = REPO_ROOT / "prompts"
SCRIPTS_DIR = REPO_ROOT / "scripts"

CASE1_QUERY = (
    "What is the highest price of product, grouped by product type? "
    "Show a bar chart, and display by the names in desc."
)


@pytest.fixture
def products_frame() -> TableFrame:
    return load_csv((DATA_DIR / "products.csv").read_bytes(), "products")


@pytest.fixture
def movies_frame() -> TableFrame:
    return load_csv((DATA_DIR / "movies.csv").read_bytes(), "movies")


def build_sqlite(path: Path, tables: dict[str, tuple[list[str], list[tuple]]]) -> Path:
    """Create a database file: {table: (column DDL list, rows)}."""
    conn = sqlite3.connect(path)
    try:
        for table, (columns, rows) in tables.items():
            conn.execute(f"CREATE TABLE {table} ({', '.join(columns)})")
            if rows:
                placeholders = ", ".join("?" for _ in rows[0])
                conn.executemany(
                    f"INSERT INTO {table} VALUES ({placeholders})", rows
                )
        conn.commit()
    finally:
        conn.close()
    return path


def build_department_store(path: Path) -> Path:
    """products table with INTEGER/TEXT/TEXT/REAL affinities, rows taken
    from the shipped CSV copy."""
    frame = load_csv((DATA_DIR / "products.csv").read_bytes(), "products")
    rows = [
        tuple(col.cells[i] for col in frame.columns)
        for i in range(frame.row_count)
    ]
    return build_sqlite(
        path,
        {
            "products": (
                [
                    "product_id INTEGER",
                    "product_type_code TEXT",
                    "product_name TEXT",
                    "product_price REAL",
                ],
                rows,
            )
        },
    )


def random_token(rng: random.Random, length: int = 10) -> str:
    return "".join(rng.choice(string.ascii_lowercase) for _ in range(length))


def random_frame(rng: random.Random, name: str = "frame") -> TableFrame:
    """A frame with distinctive cell values, for privacy-style scans.

    Text cells are random 10-letter tokens, numeric cells large random
    numbers: none of them can collide with prompt template wording. Row
    counts go beyond the categorical threshold so that both enumerated and
    non-enumerated text columns occur.
    """
    n_rows = rng.randint(1, 30)
    n_cols = rng.randint(1, 6)
    columns = []
    used_names = set()
    for c in range(n_cols):
        col_name = f"col_{random_token(rng, 6)}"
        while col_name in used_names:
            col_name = f"col_{random_token(rng, 6)}"
        used_names.add(col_name)
        kind = rng.choice(["int", "float", "text", "wide_text", "mixed"])
        cells = []
        for _ in range(n_rows):
            if kind == "int":
                cells.append(rng.randint(10**6, 10**9))
            elif kind == "float":
                cells.append(rng.randint(10**6, 10**9) / 7.0)
            elif kind == "text":
                cells.append(random_token(rng))
            elif kind == "wide_text":
                cells.append(random_token(rng, 14))
            else:
                cells.append(
                    rng.choice(
                        [None, rng.randint(10**6, 10**9), random_token(rng)]
                    )
                )
        columns.append(ColumnData(col_name, tuple(cells)))
    return TableFrame(name=name, columns=tuple(columns), row_count=n_rows)
