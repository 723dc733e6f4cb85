"""In-memory table annotation model.

All records are frozen dataclasses holding tuples, so a table can be shared
between threads or shipped to worker processes without copying concerns.
Transforms build new tables with :func:`dataclasses.replace`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

from .errors import ValidationFailure
from .geometry import BBox

SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class Word:
    text: str
    box: BBox

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("word text is empty")


@dataclass(frozen=True)
class Cell:
    row_start: int
    row_end: int
    col_start: int
    col_end: int
    box: BBox | None = None
    text: str = ""
    is_column_header: bool = False
    is_projected_row_header: bool = False

    @property
    def extent(self) -> tuple[int, int, int, int]:
        return (self.row_start, self.row_end, self.col_start, self.col_end)

    @property
    def is_blank(self) -> bool:
        return not self.text.strip()

    @property
    def is_spanning(self) -> bool:
        return self.row_end > self.row_start or self.col_end > self.col_start

    def positions(self) -> Iterator[tuple[int, int]]:
        for i in range(self.row_start, self.row_end + 1):
            for j in range(self.col_start, self.col_end + 1):
                yield i, j


@dataclass(frozen=True)
class Row:
    box: BBox | None = None
    is_column_header: bool = False


@dataclass(frozen=True)
class Column:
    box: BBox | None = None


@dataclass(frozen=True)
class Provenance:
    dataset: str = ""
    document_id: str = ""


@dataclass(frozen=True)
class TableAnnotation:
    table_id: str
    n_rows: int
    n_cols: int
    cells: tuple[Cell, ...]
    split: str = "test"
    rows: tuple[Row, ...] = ()
    columns: tuple[Column, ...] = ()
    words: tuple[Word, ...] = ()
    stage: str = "raw"
    provenance: Provenance = field(default_factory=Provenance)
    # rows that sat inside a <thead> (or similar) in the source markup
    markup_header_rows: tuple[int, ...] = ()

    def with_(self, **changes) -> TableAnnotation:
        return replace(self, **changes)

    @property
    def header_rows(self) -> tuple[int, ...]:
        return tuple(i for i, row in enumerate(self.rows) if row.is_column_header)

    @property
    def has_row_boxes(self) -> bool:
        return len(self.rows) == self.n_rows and all(r.box is not None for r in self.rows)

    @property
    def has_column_boxes(self) -> bool:
        return len(self.columns) == self.n_cols and all(c.box is not None for c in self.columns)


def validate(table: TableAnnotation) -> TableAnnotation:
    """Check every TableAnnotation invariant; raise ValidationFailure on the first breach."""
    tid = table.table_id
    if not tid:
        raise ValidationFailure(tid, "table_id", "empty table id")
    if table.split not in SPLITS:
        raise ValidationFailure(tid, "split", f"unknown split {table.split!r}")
    if table.n_rows < 1 or table.n_cols < 1:
        raise ValidationFailure(tid, "n_rows", f"grid must be non-empty, got {table.n_rows}x{table.n_cols}")
    if table.rows and len(table.rows) != table.n_rows:
        raise ValidationFailure(tid, "rows", f"expected {table.n_rows} rows, got {len(table.rows)}")
    if table.columns and len(table.columns) != table.n_cols:
        raise ValidationFailure(tid, "columns", f"expected {table.n_cols} columns, got {len(table.columns)}")
    for r in table.markup_header_rows:
        if not 0 <= r < table.n_rows:
            raise ValidationFailure(tid, "markup_header_rows", f"row {r} out of range")

    owner: dict[tuple[int, int], int] = {}
    for k, cell in enumerate(table.cells):
        path = f"cells[{k}]"
        if cell.row_start > cell.row_end or cell.col_start > cell.col_end:
            raise ValidationFailure(tid, path, f"inverted extent {cell.extent}")
        if cell.row_start < 0 or cell.col_start < 0 or cell.row_end >= table.n_rows or cell.col_end >= table.n_cols:
            raise ValidationFailure(
                tid, path, f"extent {cell.extent} outside {table.n_rows}x{table.n_cols} grid"
            )
        if cell.is_projected_row_header and (cell.col_start != 0 or cell.col_end != table.n_cols - 1):
            raise ValidationFailure(tid, path, "projected row header does not span all columns")
        for pos in cell.positions():
            if pos in owner:
                raise ValidationFailure(
                    tid, path, f"overlaps cells[{owner[pos]}] at grid position {pos}"
                )
            owner[pos] = k
    return table


def cell_at(table: TableAnnotation) -> dict[tuple[int, int], int]:
    """Map each covered grid position to the index of its cell."""
    owner = {}
    for k, cell in enumerate(table.cells):
        for pos in cell.positions():
            owner[pos] = k
    return owner


def sorted_cells(cells) -> tuple[Cell, ...]:
    """Cells in reading order (row-major by top-left corner)."""
    return tuple(sorted(cells, key=lambda c: (c.row_start, c.col_start)))
