"""CSV ingestion and deterministic shuffled train/test splits.

Cells are kept as strings throughout: values are rendered verbatim into
demonstration text later, so no numeric parsing or normalization happens
anywhere in the pipeline. Empty cells stay as empty strings.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .errors import CsvError, LabelColumnError
from .seeds import substream


@dataclass(frozen=True)
class Row:
    cells: tuple[str, ...]
    index: int  # 0-based position in the source file


@dataclass
class Table:
    columns: list[str]
    rows: list[Row]
    label_col: int

    def __post_init__(self):
        if len(self.columns) < 2:
            raise CsvError(f"need at least 2 columns (features + label), got {len(self.columns)}")
        if not 0 <= self.label_col < len(self.columns):
            raise LabelColumnError(
                f"label column index {self.label_col} out of range for {len(self.columns)} columns"
            )
        for row in self.rows:
            if len(row.cells) != len(self.columns):
                raise CsvError(
                    f"expected {len(self.columns)} cells, got {len(row.cells)}", row=row.index + 2
                )

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def label_of(self, row_index: int) -> str:
        return self.rows[row_index].cells[self.label_col]

    def feature_items(self, row_index: int) -> list[tuple[str, str]]:
        """(column name, cell value) pairs in table order, label column excluded."""
        row = self.rows[row_index]
        return [
            (name, row.cells[j])
            for j, name in enumerate(self.columns)
            if j != self.label_col
        ]


@dataclass(frozen=True)
class Split:
    train: tuple[int, ...]
    test: tuple[int, ...]
    seed: int

    def __post_init__(self):
        overlap = set(self.train) & set(self.test)
        if overlap:
            raise ValueError(f"train/test overlap: {sorted(overlap)[:5]}")


def resolve_label(columns: list[str], label: str | int | None) -> int:
    """Map a label spec (name, index, or None for last column) to a column index."""
    if label is None:
        return len(columns) - 1
    if isinstance(label, int):
        idx = label
    elif label in columns:
        return columns.index(label)
    else:
        try:
            idx = int(label)
        except ValueError:
            raise LabelColumnError(
                f"unknown label column {label!r}; available: {columns}"
            ) from None
    if not 0 <= idx < len(columns):
        raise LabelColumnError(f"label index {idx} out of range; available: {columns}")
    return idx


def parse_csv(text: str, label: str | int | None = None) -> Table:
    """Parse RFC-4180 CSV text (header row required) into a Table.

    Cell text is kept verbatim apart from stripping surrounding whitespace.
    Ragged records raise CsvError naming the offending record (1-based,
    header = record 1).
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise CsvError("empty input: no header row") from None
    columns = [c.strip() for c in header]
    if len(columns) < 2:
        raise CsvError(f"need at least 2 columns (features + label), got {len(columns)}")
    label_col = resolve_label(columns, label)

    rows: list[Row] = []
    for record_no, record in enumerate(reader, start=2):
        if not record:  # blank line
            continue
        if len(record) != len(columns):
            raise CsvError(
                f"expected {len(columns)} fields, got {len(record)}", row=record_no
            )
        rows.append(Row(cells=tuple(c.strip() for c in record), index=len(rows)))
    if not rows:
        raise CsvError("no data rows after the header")
    return Table(columns=columns, rows=rows, label_col=label_col)


def load_csv(path: str | Path, label: str | int | None = None) -> Table:
    """Read a UTF-8 CSV file with header row and designate the label column."""
    return parse_csv(Path(path).read_text(encoding="utf-8"), label=label)


def write_csv(table: Table, path: str | Path) -> None:
    """Round-trip companion to load_csv, used by tests and graph dumps."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow(row.cells)


def shuffle_split(table: Table, seed: int, train_frac: float = 0.8) -> Split:
    """Shuffle all row indices and split train/test at round(train_frac * n).

    Pure function of (n_rows, seed, train_frac): the same inputs always
    produce the same Split. Rounding is half-up.
    """
    n = table.n_rows
    if n < 2:
        raise ValueError(f"need at least 2 rows to split, got {n}")
    if not 0.0 < train_frac < 1.0:
        raise ValueError(f"train_frac must be in (0, 1), got {train_frac}")
    perm = substream(seed, "split").permutation(n)
    n_train = int(train_frac * n + 0.5)
    return Split(
        train=tuple(int(i) for i in perm[:n_train]),
        test=tuple(int(i) for i in perm[n_train:]),
        seed=seed,
    )
