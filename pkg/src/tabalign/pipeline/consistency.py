"""Consistency adjustments: dot leaders, empty rows/columns, header-row merging, split currency columns."""

from __future__ import annotations

import re
from dataclasses import replace

from ..geometry import union_all
from ..grid import all_grid_cells, build_grid, cell_region, slot_words
from ..model import Cell, Row, TableAnnotation
from .codes import Reason, TableRemoved
from .options import PipelineOptions

_LEADER = re.compile(r"\.+")


def _leader_dots(text: str) -> int:
    """Number of dots if the token is made of dots only, else 0."""
    compact = "".join(text.split())
    return len(compact) if _LEADER.fullmatch(compact) else 0


def _edge_runs(tokens: list[str], min_dots: int) -> tuple[int, int]:
    """Lengths of the leading and trailing leader runs worth stripping."""

    def run(seq) -> int:
        n = dots = 0
        for tok in seq:
            d = _leader_dots(tok)
            if not d:
                break
            n, dots = n + 1, dots + d
        return n if dots >= min_dots else 0

    lead = run(tokens)
    if lead == len(tokens):
        return lead, 0
    return lead, run(reversed(tokens))


def strip_dot_leaders(table: TableAnnotation, options: PipelineOptions | None = None) -> TableAnnotation:
    """Drop runs of dot-leader tokens at the left or right edge of every cell.

    Stripped leader words leave the table's word list; cell boxes shrink to
    the remaining words and never grow.
    """
    options = options or PipelineOptions()
    min_dots = options.dot_leader_min_dots
    grid_cells = all_grid_cells(table)
    slots = slot_words([cell_region(table, c) for c in grid_cells], table.words)
    by_cell: dict[int, list[int]] = {}
    for w, slot in enumerate(slots):
        if slot is not None and slot < len(table.cells):
            by_cell.setdefault(slot, []).append(w)

    dropped: set[int] = set()
    cells = list(table.cells)
    for k, cell in enumerate(table.cells):
        if cell.is_blank:
            continue
        new_box, new_text = cell.box, cell.text

        word_ids = sorted(by_cell.get(k, []), key=lambda w: (table.words[w].box.x_min, table.words[w].box.y_min))
        lead, trail = _edge_runs([table.words[w].text for w in word_ids], min_dots)
        if lead or trail:
            leaders = word_ids[:lead] + word_ids[len(word_ids) - trail :]
            kept = word_ids[lead : len(word_ids) - trail]
            if not kept:
                raise TableRemoved(Reason.LeaderAmbiguity, f"cell {list(cell.extent)} is only dot leaders")
            dropped.update(leaders)
            tight = union_all(table.words[w].box for w in kept)
            if cell.box is not None:
                tight = tight.intersection(cell.box) or cell.box
            new_box = tight

        tokens = cell.text.split()
        lead, trail = _edge_runs(tokens, min_dots)
        if lead or trail:
            remaining = tokens[lead : len(tokens) - trail]
            if not remaining:
                raise TableRemoved(Reason.LeaderAmbiguity, f"cell {list(cell.extent)} is only dot leaders")
            new_text = " ".join(remaining)

        if new_box != cell.box or new_text != cell.text:
            cells[k] = replace(cell, box=new_box, text=new_text)

    if not dropped and cells == list(table.cells):
        return table
    words = tuple(w for i, w in enumerate(table.words) if i not in dropped)
    return table.with_(cells=tuple(cells), words=words)


def _blank_lines(grid, n_lines: int, n_other: int, axis: int) -> list[int]:
    out = []
    for a in range(n_lines):
        entries = (grid.entries[a][b] if axis == 0 else grid.entries[b][a] for b in range(n_other))
        if all(e.is_blank for e in entries):
            out.append(a)
    return out


def _remap(start: int, end: int, kept: list[int]) -> tuple[int, int] | None:
    inside = [new for new, old in enumerate(kept) if start <= old <= end]
    return (inside[0], inside[-1]) if inside else None


def remove_empty_rows_columns(table: TableAnnotation, options: PipelineOptions | None = None) -> TableAnnotation:
    grid = build_grid(table)
    empty_rows = _blank_lines(grid, table.n_rows, table.n_cols, 0)
    empty_cols = _blank_lines(grid, table.n_cols, table.n_rows, 1)
    if not empty_rows and not empty_cols:
        return table
    if len(empty_rows) == table.n_rows or len(empty_cols) == table.n_cols:
        raise TableRemoved(Reason.AllEmpty, "every row is blank")
    kept_rows = [i for i in range(table.n_rows) if i not in empty_rows]
    kept_cols = [j for j in range(table.n_cols) if j not in empty_cols]

    cells = []
    for cell in table.cells:
        rows = _remap(cell.row_start, cell.row_end, kept_rows)
        cols = _remap(cell.col_start, cell.col_end, kept_cols)
        if rows is None or cols is None:
            continue  # lies entirely in removed lines, hence blank
        cells.append(replace(cell, row_start=rows[0], row_end=rows[1], col_start=cols[0], col_end=cols[1]))

    return table.with_(
        n_rows=len(kept_rows),
        n_cols=len(kept_cols),
        cells=tuple(cells),
        rows=tuple(table.rows[i] for i in kept_rows) if table.rows else (),
        columns=tuple(table.columns[j] for j in kept_cols) if table.columns else (),
        markup_header_rows=tuple(kept_rows.index(r) for r in table.markup_header_rows if r in kept_rows),
    )


def _row_pattern(table: TableAnnotation, grid, r: int) -> list[tuple[int, int, int | None]] | None:
    """(col_start, col_end, cell index) for each cell in row r, or None if any cell leaves the row."""
    pattern = []
    j = 0
    while j < table.n_cols:
        entry = grid.entries[r][j]
        if entry.cell_ref is None:
            pattern.append((j, j, None))
            j += 1
            continue
        cell = table.cells[entry.cell_ref]
        if cell.row_start != r or cell.row_end != r:
            return None
        pattern.append((cell.col_start, cell.col_end, entry.cell_ref))
        j = cell.col_end + 1
    return pattern


def _merge_rows(table: TableAnnotation, r: int, top, bottom) -> TableAnnotation:
    merged_ids = set()
    new_cells = []
    for (c0, c1, a), (_, _, b) in zip(top, bottom):
        pair = [table.cells[k] for k in (a, b) if k is not None]
        merged_ids.update(k for k in (a, b) if k is not None)
        texts = [c.text.strip() for c in pair if not c.is_blank]
        if not texts and c0 == c1:
            continue
        new_cells.append(
            Cell(
                r,
                r,
                c0,
                c1,
                box=union_all(c.box for c in pair),
                text=" ".join(texts),
                is_column_header=any(c.is_column_header for c in pair),
                is_projected_row_header=any(c.is_projected_row_header for c in pair),
            )
        )
    cells = []
    for k, cell in enumerate(table.cells):
        if k in merged_ids:
            continue
        if cell.row_start > r + 1:
            cell = replace(cell, row_start=cell.row_start - 1, row_end=cell.row_end - 1)
        cells.append(cell)
    rows = list(table.rows)
    if rows:
        a, b = rows[r], rows[r + 1]
        rows[r : r + 2] = [Row(union_all([a.box, b.box]), a.is_column_header or b.is_column_header)]
    return table.with_(
        n_rows=table.n_rows - 1,
        cells=tuple(sorted(cells + new_cells, key=lambda c: (c.row_start, c.col_start))),
        rows=tuple(rows),
        markup_header_rows=tuple(
            m if m <= r else m - 1 for m in table.markup_header_rows if m != r + 1
        ),
    )


def merge_adjacent_header_rows(table: TableAnnotation, options: PipelineOptions | None = None) -> TableAnnotation:
    """Merge neighbouring header rows whose cells cover identical column ranges."""
    while True:
        header = set(table.markup_header_rows) or set(table.header_rows)
        grid = build_grid(table)
        for r in sorted(header):
            if r + 1 not in header:
                continue
            top = _row_pattern(table, grid, r)
            bottom = _row_pattern(table, grid, r + 1)
            if top is None or bottom is None:
                continue
            if [p[:2] for p in top] != [p[:2] for p in bottom]:
                continue
            table = _merge_rows(table, r, top, bottom)
            break
        else:
            return table


def is_currency_only(text: str, glyphs: str) -> bool:
    core = "".join(ch for ch in text if not ch.isspace() and ch not in "()")
    return bool(core) and all(ch in glyphs for ch in core)


def detect_currency_column_removal(
    table: TableAnnotation, options: PipelineOptions | None = None
) -> TableAnnotation:
    """Remove tables with a column holding nothing but currency symbols in the body."""
    options = options or PipelineOptions()
    grid = build_grid(table)
    header = set(table.markup_header_rows) | set(table.header_rows)
    for j in range(table.n_cols):
        texts = {
            grid.entries[i][j].cell_ref: grid.entries[i][j].text
            for i in range(table.n_rows)
            if i not in header and not grid.entries[i][j].is_blank
        }
        if texts and all(is_currency_only(t, options.currency_glyphs) for t in texts.values()):
            raise TableRemoved(Reason.CurrencySplitColumn, f"column {j} holds only currency symbols")
    return table
