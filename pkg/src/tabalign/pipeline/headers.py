"""Column-header and projected-row-header inference."""

from __future__ import annotations

import re
from dataclasses import replace

from ..grid import TableGrid, build_grid
from ..model import Row, TableAnnotation
from .canonicalize import absorb_row
from .options import PipelineOptions

# applied after currency glyphs and whitespace are removed
_NUMERIC = re.compile(r"^\(?[-−+]?(?:\d{1,3}(?:,\d{3})+|\d+)?(?:\.\d+)?%?\)?$")


def is_numeric_like(text: str, glyphs: str = "$¢£€") -> bool:
    """Accounting-style numbers: optional currency, comma groups, decimals, %, parentheses."""
    s = "".join(ch for ch in text if not ch.isspace() and ch not in glyphs)
    return any(ch.isdigit() for ch in s) and _NUMERIC.match(s) is not None


def _is_projected_row(table: TableAnnotation, grid: TableGrid, r: int) -> int | None:
    """Index of the row's sole non-blank cell if the row is a projected row header."""
    refs = {e.cell_ref for e in grid.entries[r] if not e.is_blank}
    if len(refs) != 1:
        return None
    (k,) = refs
    cell = table.cells[k]
    if cell.row_start != r or cell.row_end != r or cell.col_start != 0:
        return None
    for entry in grid.entries[r]:
        if entry.cell_ref is None or entry.cell_ref == k:
            continue
        other = table.cells[entry.cell_ref]
        if other.row_start != r or other.row_end != r:
            return None
    return k


def _is_complete(table: TableAnnotation, grid: TableGrid, r: int) -> bool:
    """Every column holds its own non-blank cell ending in this row (the stub may be blank)."""
    for j, entry in enumerate(grid.entries[r]):
        cell = None if entry.cell_ref is None else table.cells[entry.cell_ref]
        if entry.is_blank:
            if j != 0 or (cell is not None and cell.is_spanning):
                return False
            continue
        if cell.col_start != cell.col_end or cell.row_end != r:
            return False
    return True


def column_header_end(table: TableAnnotation, grid: TableGrid | None = None) -> int | None:
    """Last row of the column header, or None if it cannot be determined.

    The header runs from the top through the first complete row; a
    projected row header before that, or no complete row in the top half,
    leaves it undetermined.
    """
    grid = grid or build_grid(table)
    for r in range(table.n_rows):
        if _is_projected_row(table, grid, r) is not None or not r < table.n_rows / 2:
            return None
        if _is_complete(table, grid, r):
            return r
    return None


def _set_header(table: TableAnnotation, end: int | None) -> TableAnnotation:
    rows = table.rows or tuple(Row() for _ in range(table.n_rows))
    in_header = (lambda r: r <= end) if end is not None else (lambda r: False)
    rows = tuple(replace(row, is_column_header=in_header(i)) for i, row in enumerate(rows))
    cells = tuple(
        replace(c, is_column_header=in_header(c.row_end)) if c.is_column_header != in_header(c.row_end) else c
        for c in table.cells
    )
    return table.with_(rows=rows, cells=cells)


def mark_projected_rows(table: TableAnnotation) -> TableAnnotation:
    """Flag projected row headers and stretch each over its full row."""
    if table.n_cols < 2:
        return table
    r = 0
    while r < table.n_rows:
        grid = build_grid(table)
        k = _is_projected_row(table, grid, r)
        if k is not None:
            cell = table.cells[k]
            if not cell.is_projected_row_header:
                cells = list(table.cells)
                cells[k] = replace(cell, is_projected_row_header=True)
                table = table.with_(cells=tuple(cells))
            if cell.col_end != table.n_cols - 1:
                table = absorb_row(table, k)
        r += 1
    return table


def infer_headers(table: TableAnnotation, options: PipelineOptions | None = None) -> TableAnnotation:
    """Infer projected row headers, and the column header for tables with other than two columns.

    Two-column headers are left to :func:`infer_two_column_header`.
    """
    if table.n_cols < 2:
        return table
    table = mark_projected_rows(table)
    if table.n_cols == 2:
        return table
    return _set_header(table, column_header_end(table))


def infer_two_column_header(table: TableAnnotation, options: PipelineOptions | None = None) -> TableAnnotation:
    """Mark the first row of a two-column table as header when its text looks like labels over numbers."""
    if table.n_cols != 2 or table.n_rows < 2:
        return table
    glyphs = (options or PipelineOptions()).currency_glyphs
    grid = build_grid(table)
    first = [e.text for e in grid.entries[0] if not e.is_blank]
    if not first or any(is_numeric_like(t, glyphs) for t in first):
        return table
    for j in range(2):
        body = {
            e.cell_ref: e.text
            for e in (grid.entries[i][j] for i in range(1, table.n_rows))
            if not e.is_blank and table.cells[e.cell_ref].col_start == table.cells[e.cell_ref].col_end
        }
        numeric = sum(is_numeric_like(t, glyphs) for t in body.values())
        if body and 2 * numeric > len(body):
            return _set_header(table, 0)
    return table
