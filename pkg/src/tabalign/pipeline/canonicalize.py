"""Canonicalization: merge oversegmented blank header regions into their spanning cells.

Three rules run to a fixed point:

R1  blank header positions directly below a multi-column header cell, within
    its column range, join that cell (one header row at a time);
R2  a blank header position whose left neighbour is non-blank, and whose
    cell above also covers the left neighbour's column, joins the left
    neighbour;
R3  a projected row header absorbs every blank position in its row.

Only blank positions are ever absorbed, so merged cells keep the absorber's
text and their boxes are unions.
"""

from __future__ import annotations

from dataclasses import replace

from ..geometry import union_all
from ..grid import build_grid
from ..model import Cell, TableAnnotation
from .codes import Reason, TableRemoved
from .options import PipelineOptions


def extend_cell(cells: list[Cell], k: int, row_end: int, col_start: int, col_end: int) -> list[Cell] | None:
    """Grow cells[k] to the given extent by absorbing blank cells.

    Returns the new cell list, or None when a blank cell only partly lies in
    the new extent.  Raises CanonicalizationConflict when the extension
    would swallow a non-blank cell.
    """
    target = cells[k]
    r0, c0 = target.row_start, col_start
    absorbed = []
    for m, other in enumerate(cells):
        if m == k:
            continue
        overlaps = not (
            other.row_end < r0 or other.row_start > row_end or other.col_end < c0 or other.col_start > col_end
        )
        if not overlaps:
            continue
        if not other.is_blank:
            raise TableRemoved(
                Reason.CanonicalizationConflict,
                f"merging into {list(target.extent)} would join non-blank cell {list(other.extent)}",
            )
        inside = (
            other.row_start >= r0 and other.row_end <= row_end and other.col_start >= c0 and other.col_end <= col_end
        )
        if not inside:
            return None
        absorbed.append(m)
    grown = replace(
        target,
        row_end=row_end,
        col_start=col_start,
        col_end=col_end,
        box=union_all([target.box] + [cells[m].box for m in absorbed]),
    )
    out = [grown if m == k else c for m, c in enumerate(cells) if m not in absorbed]
    return out


def _blank_at(grid, cells: list[Cell], i: int, j: int) -> bool:
    entry = grid.entries[i][j]
    return entry.cell_ref is None or cells[entry.cell_ref].is_blank


def _apply_once(table: TableAnnotation, cells: list[Cell], header: set[int]) -> list[Cell] | None:
    """Apply the first rule that fires; None when nothing applies."""
    grid = build_grid(table.with_(cells=tuple(cells)))

    # R1
    for k, cell in enumerate(cells):
        if cell.is_blank or cell.col_end == cell.col_start or cell.row_start not in header:
            continue
        r = cell.row_end + 1
        if r in header and all(_blank_at(grid, cells, r, j) for j in range(cell.col_start, cell.col_end + 1)):
            out = extend_cell(cells, k, r, cell.col_start, cell.col_end)
            if out is not None:
                return out

    # R2
    for r in sorted(header):
        if r == 0:
            continue
        for j in range(1, table.n_cols):
            if not _blank_at(grid, cells, r, j):
                continue
            left = grid.entries[r][j - 1].cell_ref
            above = grid.entries[r - 1][j].cell_ref
            if left is None or cells[left].is_blank or above is None:
                continue
            if grid.entries[r - 1][j - 1].cell_ref != above:
                continue
            lc = cells[left]
            if lc.col_end != j - 1 or lc.row_start not in header or lc.row_end not in header:
                continue
            if not all(_blank_at(grid, cells, i, j) for i in range(lc.row_start, lc.row_end + 1)):
                continue
            out = extend_cell(cells, left, lc.row_end, lc.col_start, j)
            if out is not None:
                return out

    # R3
    for k, cell in enumerate(cells):
        if cell.is_projected_row_header and (cell.col_start != 0 or cell.col_end != table.n_cols - 1):
            out = extend_cell(cells, k, cell.row_end, 0, table.n_cols - 1)
            if out is not None:
                return out
    return None


def absorb_row(table: TableAnnotation, k: int) -> TableAnnotation:
    """Stretch cell k over its whole row (the R3 merge)."""
    cell = table.cells[k]
    out = extend_cell(list(table.cells), k, cell.row_end, 0, table.n_cols - 1)
    if out is None:
        raise TableRemoved(Reason.CanonicalizationConflict, f"row {cell.row_start} cannot be merged")
    return table.with_(cells=tuple(out))


def canonicalize(table: TableAnnotation, options: PipelineOptions | None = None) -> TableAnnotation:
    header = set(table.header_rows)
    if table.n_cols == 2 and not header:
        raise TableRemoved(Reason.TwoColumnAmbiguous, "two-column table without an established header")
    cells = list(table.cells)
    changed = False
    while (out := _apply_once(table, cells, header)) is not None:
        cells, changed = out, True
    if not changed:
        return table
    return table.with_(cells=tuple(sorted(cells, key=lambda c: (c.row_start, c.col_start))))
