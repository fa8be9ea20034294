"""Load tabular data and profile its schema.

The profiler reduces every column to one of three dtype names and, for
low-cardinality text columns, enumerates the distinct values. Those facts
are all the language model ever learns about a dataset.
"""

from pathlib import Path

from text2chart import load_csv, profile_table

DATA = Path(__file__).resolve().parents[1] / "data"

frame = load_csv((DATA / "products.csv").read_bytes(), "products")
print(f"loaded {frame.name}: {frame.row_count} rows, columns {frame.column_names}")

profile = profile_table(frame)
for column in profile.columns:
    line = f"  {column.name}: {column.dtype}"
    if column.categorical_values:
        line += f"  values={list(column.categorical_values)}"
    print(line)

# A column needs fewer than 20 distinct values to be enumerated. The movie
# titles below stay private: 44 distinct values is past the threshold.
movies = load_csv((DATA / "movies.csv").read_bytes(), "movies")
for column in profile_table(movies).columns:
    enumerated = column.categorical_values is not None
    print(f"  movies.{column.name}: {column.dtype} enumerated={enumerated}")
