"""Dense grid view of a table, word slotting, and topology signatures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import OutOfRange, OverlappingCells
from .geometry import BBox
from .model import Cell, TableAnnotation, Word

RelExtent = tuple[int, int, int, int]
NO_EXTENT: RelExtent = (0, 0, 0, 0)


@dataclass(frozen=True)
class GridEntry:
    cell_ref: int | None
    text: str = ""
    box: BBox | None = None
    rel_extent: RelExtent = NO_EXTENT

    @property
    def is_blank(self) -> bool:
        return not self.text.strip()


BLANK = GridEntry(None)


@dataclass(frozen=True)
class TableGrid:
    n_rows: int
    n_cols: int
    entries: tuple[tuple[GridEntry, ...], ...]

    def __getitem__(self, pos: tuple[int, int]) -> GridEntry:
        i, j = pos
        return self.entries[i][j]

    @property
    def size(self) -> int:
        return self.n_rows * self.n_cols


def build_grid(table: TableAnnotation) -> TableGrid:
    n_rows, n_cols = table.n_rows, table.n_cols
    entries: list[list[GridEntry]] = [[BLANK] * n_cols for _ in range(n_rows)]
    owner: dict[tuple[int, int], int] = {}
    for k, cell in enumerate(table.cells):
        if (
            cell.row_start < 0
            or cell.col_start < 0
            or cell.row_end >= n_rows
            or cell.col_end >= n_cols
            or cell.row_start > cell.row_end
            or cell.col_start > cell.col_end
        ):
            raise OutOfRange(k)
        for i, j in cell.positions():
            if (i, j) in owner:
                raise OverlappingCells((owner[(i, j)], k), (i, j))
            owner[(i, j)] = k
            entries[i][j] = GridEntry(
                cell_ref=k,
                text=cell.text,
                box=cell.box,
                rel_extent=(cell.row_start - i, cell.row_end - i, cell.col_start - j, cell.col_end - j),
            )
    return TableGrid(n_rows, n_cols, tuple(tuple(row) for row in entries))


def grid_from_texts(rows: Sequence[Sequence[str]]) -> TableGrid:
    """Grid of simple (unspanned) cells from a matrix of strings."""
    entries = []
    n_cols = len(rows[0]) if rows else 0
    for i, row in enumerate(rows):
        if len(row) != n_cols:
            raise ValueError("ragged text matrix")
        entries.append(tuple(GridEntry(i * n_cols + j, text) for j, text in enumerate(row)))
    return TableGrid(len(rows), n_cols, tuple(entries))


def cells_from_grid(grid: TableGrid) -> list[tuple[int, int, int, int]]:
    """Recover cell extents from the rectangles sharing one cell_ref.

    Uncovered positions are skipped.  The result is ordered by cell_ref.
    """
    spans: dict[int, list[int]] = {}
    for i, row in enumerate(grid.entries):
        for j, entry in enumerate(row):
            if entry.cell_ref is None:
                continue
            s = spans.setdefault(entry.cell_ref, [i, i, j, j])
            s[0], s[1] = min(s[0], i), max(s[1], i)
            s[2], s[3] = min(s[2], j), max(s[3], j)
    return [tuple(spans[k]) for k in sorted(spans)]


def all_grid_cells(table: TableAnnotation) -> list[Cell]:
    """Stored cells followed by a 1x1 blank cell for every uncovered position."""
    covered = {pos for cell in table.cells for pos in cell.positions()}
    blanks = [
        Cell(i, i, j, j)
        for i in range(table.n_rows)
        for j in range(table.n_cols)
        if (i, j) not in covered
    ]
    return list(table.cells) + blanks


def cell_region(table: TableAnnotation, cell: Cell) -> BBox | None:
    """Box of the grid area a cell occupies, from the row and column boxes."""
    if not (table.has_row_boxes and table.has_column_boxes):
        return cell.box
    top = table.rows[cell.row_start].box
    bottom = table.rows[cell.row_end].box
    left = table.columns[cell.col_start].box
    right = table.columns[cell.col_end].box
    return BBox(left.x_min, top.y_min, right.x_max, bottom.y_max)


def slot_words(boxes: Sequence[BBox | None], words: Sequence[Word]) -> list[int | None]:
    """Assign each word to the box it overlaps most.

    Words overlapping nothing get None; ties go to the lowest box index.
    """
    assignment: list[int | None] = []
    for word in words:
        best, best_area = None, 0.0
        for k, box in enumerate(boxes):
            if box is None:
                continue
            area = word.box.intersection_area(box)
            if area > best_area:
                best, best_area = k, area
        assignment.append(best)
    return assignment


def topology_signature(table: TableAnnotation) -> str:
    grid = build_grid(table)
    body = ";".join(
        ",".join(str(v) for v in entry.rel_extent) for row in grid.entries for entry in row
    )
    return f"{grid.n_rows}x{grid.n_cols}|{body}"
