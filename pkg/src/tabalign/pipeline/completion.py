"""Row and column boxes: creating them from cell boxes and refining them against words."""

from __future__ import annotations

from dataclasses import replace
from typing import Sequence

from ..geometry import BBox, union_all
from ..grid import all_grid_cells, cell_region, slot_words
from ..model import Cell, Column, Row, TableAnnotation
from .codes import Reason, TableRemoved
from .options import PipelineOptions

Interval = tuple[float, float]


def _axis_evidence(evidence: Sequence[tuple[Cell, BBox]], n: int, axis: int) -> list[Interval | None]:
    """Text extent of each row (axis 0) or column (axis 1).

    Cells confined to one index are preferred; an index with no such cell
    receives an even share of each spanning cell that covers it.
    """

    def span(cell: Cell) -> tuple[int, int]:
        return (cell.row_start, cell.row_end) if axis == 0 else (cell.col_start, cell.col_end)

    def interval(box: BBox) -> Interval:
        return (box.y_min, box.y_max) if axis == 0 else (box.x_min, box.x_max)

    single: list[Interval | None] = [None] * n
    shared: list[Interval | None] = [None] * n
    for cell, box in evidence:
        start, end = span(cell)
        lo, hi = interval(box)
        if start == end:
            old = single[start]
            single[start] = (lo, hi) if old is None else (min(old[0], lo), max(old[1], hi))
            continue
        step = (hi - lo) / (end - start + 1)
        for k in range(start, end + 1):
            piece = (lo + (k - start) * step, lo + (k - start + 1) * step)
            old = shared[k]
            shared[k] = piece if old is None else (min(old[0], piece[0]), max(old[1], piece[1]))
    return [s if s is not None else f for s, f in zip(single, shared)]


def tile_extents(extents: Sequence[Interval | None], lo: float, hi: float) -> list[Interval]:
    """Partition [lo, hi] into consecutive intervals, one per index.

    Neighbouring text extents meet at the middle of the gap between them.
    Indices without evidence share the gap between the nearest defined
    neighbours evenly; leading or trailing indices without evidence cannot
    be placed.
    """
    n = len(extents)
    defined = [i for i, e in enumerate(extents) if e is not None]
    if not defined:
        raise TableRemoved(Reason.UndefinedExtent, "no text evidence")
    if defined[0] != 0 or defined[-1] != n - 1:
        missing = 0 if defined[0] != 0 else n - 1
        raise TableRemoved(Reason.UndefinedExtent, f"index {missing} has no text evidence")
    bounds: list[float] = [0.0] * (n + 1)
    bounds[0], bounds[n] = lo, hi
    for p, q in zip(defined, defined[1:]):
        a, b = extents[p], extents[q]
        if b[0] < a[0] or b[1] < a[1]:
            raise TableRemoved(Reason.InvertedOrder, f"extent {q} precedes extent {p}")
        gap_rows = q - p - 1
        if gap_rows == 0:
            bounds[q] = (a[1] + b[0]) / 2
            continue
        if b[0] <= a[1]:
            raise TableRemoved(Reason.UndefinedExtent, f"no room for indices {p + 1}..{q - 1}")
        step = (b[0] - a[1]) / gap_rows
        for m in range(gap_rows + 1):
            bounds[p + 1 + m] = a[1] + m * step
        bounds[q] = b[0]
    for k in range(n):
        if not bounds[k] < bounds[k + 1]:
            raise TableRemoved(Reason.InvertedOrder, f"index {k} has non-positive size")
    return [(bounds[k], bounds[k + 1]) for k in range(n)]


def _rows_and_columns(
    table: TableAnnotation, evidence: Sequence[tuple[Cell, BBox]]
) -> tuple[tuple[Row, ...], tuple[Column, ...]]:
    if not evidence:
        raise TableRemoved(Reason.UndefinedExtent, "no boxed, non-blank cells")
    extent = union_all(box for _, box in evidence)
    row_ext = tile_extents(_axis_evidence(evidence, table.n_rows, 0), extent.y_min, extent.y_max)
    col_ext = tile_extents(_axis_evidence(evidence, table.n_cols, 1), extent.x_min, extent.x_max)
    old_flags = [r.is_column_header for r in table.rows] or [False] * table.n_rows
    rows = tuple(
        Row(BBox(extent.x_min, y0, extent.x_max, y1), flag) for (y0, y1), flag in zip(row_ext, old_flags)
    )
    columns = tuple(Column(BBox(x0, extent.y_min, x1, extent.y_max)) for x0, x1 in col_ext)
    return rows, columns


def complete_rows_columns(table: TableAnnotation, options: PipelineOptions | None = None) -> TableAnnotation:
    evidence = [(c, c.box) for c in table.cells if c.box is not None and not c.is_blank]
    rows, columns = _rows_and_columns(table, evidence)
    return table.with_(rows=rows, columns=columns)


def find_ambiguous_word(table: TableAnnotation, regions: Sequence[BBox | None], threshold: float) -> int | None:
    """Index of the first word with at least `threshold` of its area inside two or more regions."""
    for k, word in enumerate(table.words):
        area = word.box.area
        if area <= 0:
            continue
        hits = 0
        for region in regions:
            if region is not None and word.box.intersection_area(region) >= threshold * area:
                hits += 1
                if hits >= 2:
                    return k
    return None


def refine_boxes(table: TableAnnotation, options: PipelineOptions | None = None) -> TableAnnotation:
    """Tighten row/column boxes around the words they hold, to a fixed point.

    Cell text boxes become the union of the words slotted into each cell.
    """
    options = options or PipelineOptions()
    if not (table.has_row_boxes and table.has_column_boxes):
        table = complete_rows_columns(table)
    grid_cells = all_grid_cells(table)
    stored = len(table.cells)

    for _ in range(options.iteration_cap):
        regions = [cell_region(table, c) for c in grid_cells]
        slots = slot_words(regions, table.words)
        word_boxes: dict[int, BBox] = {}
        for word, slot in zip(table.words, slots):
            if slot is not None and slot < stored:
                word_boxes[slot] = word.box if slot not in word_boxes else word_boxes[slot].union(word.box)
        evidence = []
        for k, cell in enumerate(table.cells):
            if cell.is_blank:
                continue
            box = word_boxes.get(k, cell.box)
            if box is not None:
                evidence.append((cell, box))
        rows, columns = _rows_and_columns(table, evidence)
        if rows == table.rows and columns == table.columns:
            break
        table = table.with_(rows=rows, columns=columns)
    else:
        raise TableRemoved(Reason.NoConvergence, f"boxes still moving after {options.iteration_cap} rounds")

    if (k := find_ambiguous_word(table, regions, options.word_overlap_threshold)) is not None:
        raise TableRemoved(Reason.AmbiguousWord, f"word {table.words[k].text!r} overlaps several cells")

    cells = tuple(
        replace(c, box=word_boxes[k]) if k in word_boxes and not c.is_blank else c
        for k, c in enumerate(table.cells)
    )
    return table.with_(cells=cells)
