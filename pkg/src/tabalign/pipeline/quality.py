from __future__ import annotations

from ..grid import all_grid_cells, cell_region
from ..model import TableAnnotation
from .codes import Reason, TableRemoved
from .options import PipelineOptions


def projected_rows(table: TableAnnotation) -> set[int]:
    return {c.row_start for c in table.cells if c.is_projected_row_header}


def quality_control(table: TableAnnotation, options: PipelineOptions | None = None) -> TableAnnotation:
    """Final filter: words must sit in exactly one cell, no caption/footer rows, and a body must exist."""
    threshold = (options or PipelineOptions()).word_overlap_threshold
    regions = [r for r in (cell_region(table, c) for c in all_grid_cells(table)) if r is not None]
    for word in table.words:
        area = word.box.area
        if area <= 0:
            continue
        shares = [word.box.intersection_area(r) / area for r in regions]
        if not shares or max(shares) <= threshold:
            raise TableRemoved(Reason.WordCellCoincidence, f"word {word.text!r} lies in no cell")
        if sum(s >= threshold for s in shares) >= 2:
            raise TableRemoved(Reason.WordCellCoincidence, f"word {word.text!r} lies in several cells")

    prh = projected_rows(table)
    if 0 in prh:
        raise TableRemoved(Reason.CaptionAsRow, "first row is a projected row header")
    if table.n_rows - 1 in prh:
        raise TableRemoved(Reason.FooterAsRow, "last row is a projected row header")
    if len(table.header_rows) >= table.n_rows:
        raise TableRemoved(Reason.HeaderOnly, "every row belongs to the column header")
    return table
