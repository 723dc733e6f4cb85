"""Content-keyed directed adjacency relations."""

from __future__ import annotations

from collections import Counter

from ..grid import TableGrid, cells_from_grid
from .grits import as_grid
from .similarity import normalize_text


def adjacency_relations(grid: TableGrid) -> Counter:
    """Multiset of (text, neighbour text, direction) over non-blank cells.

    From every row (column) a cell occupies, the scan moves right (down)
    past blank entries to the first non-blank cell.  A neighbour reached
    from several rows counts once.
    """
    grid = as_grid(grid)
    relations: Counter = Counter()
    refs = {e.cell_ref for row in grid.entries for e in row if e.cell_ref is not None}
    extents = dict(zip(sorted(refs), cells_from_grid(grid)))
    for ref, (r0, r1, c0, c1) in extents.items():
        anchor = grid.entries[r0][c0]
        if anchor.is_blank:
            continue
        text = normalize_text(anchor.text)
        for direction, lines, scan in (
            ("right", range(r0, r1 + 1), lambda i, step: (i, c1 + step)),
            ("down", range(c0, c1 + 1), lambda j, step: (r1 + step, j)),
        ):
            seen = set()
            for line in lines:
                step = 1
                while True:
                    i, j = scan(line, step)
                    if i >= grid.n_rows or j >= grid.n_cols:
                        break
                    entry = grid.entries[i][j]
                    if not entry.is_blank:
                        if entry.cell_ref not in seen:
                            seen.add(entry.cell_ref)
                            relations[(text, normalize_text(entry.text), direction)] += 1
                        break
                    step += 1
    return relations


def dar_con(gt, pred) -> float:
    a, b = adjacency_relations(gt), adjacency_relations(pred)
    total = sum(a.values()) + sum(b.values())
    if total == 0:
        return 1.0
    return 2 * sum((a & b).values()) / total
