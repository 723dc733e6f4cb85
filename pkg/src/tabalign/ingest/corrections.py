"""Manual-correction overlays.

An overlay file is JSON::

    {"version": "1",
     "corrections": [
        {"table_id": "us-012-1-1",
         "ops": [
            {"replace_cell": {"match": [r0, r1, c0, c1], "new": {<cell>}}},
            {"set_text": {"cell": [r0, r1, c0, c1], "text": "..."}},
            {"split_table": {"rows": [5]}}
         ]}]}

Cell extents are ``[row_start, row_end, col_start, col_end]`` and a new cell
uses the canonical cell schema (missing fields take their defaults).
``split_table`` lists the rows at which each new table starts; the pieces
get ids suffixed ``_1``, ``_2``, ...
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Sequence

from ..errors import CorrectionError, ResultInvalid, TableError, TargetNotFound
from ..geometry import BBox
from ..grid import slot_words
from ..model import Cell, TableAnnotation, validate

OVERLAY_VERSION = "1"


@dataclass(frozen=True)
class ManualCorrection:
    table_id: str
    ops: tuple[dict[str, Any], ...]


def load_overlay(path: str | Path) -> list[ManualCorrection]:
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    return parse_overlay(data)


def parse_overlay(data: Any) -> list[ManualCorrection]:
    if isinstance(data, dict):
        if str(data.get("version", OVERLAY_VERSION)) != OVERLAY_VERSION:
            raise CorrectionError(f"unsupported overlay version {data.get('version')!r}")
        data = data.get("corrections", [])
    if not isinstance(data, list):
        raise CorrectionError("overlay must hold a list of corrections")
    out = []
    for k, entry in enumerate(data):
        if not isinstance(entry, dict) or "table_id" not in entry:
            raise CorrectionError(f"correction {k} lacks a table_id")
        ops = entry.get("ops", [])
        for op in ops:
            if not isinstance(op, dict) or len(op) != 1:
                raise CorrectionError(f"correction {k}: each op must have exactly one key")
            (kind,) = op
            if kind not in ("replace_cell", "set_text", "split_table"):
                raise CorrectionError(f"correction {k}: unknown op {kind!r}")
        out.append(ManualCorrection(str(entry["table_id"]), tuple(ops)))
    return out


def _find_cell(table: TableAnnotation, extent: Sequence[int]) -> int:
    target = tuple(int(v) for v in extent)
    for k, cell in enumerate(table.cells):
        if cell.extent == target:
            return k
    raise TargetNotFound(f"{table.table_id}: no cell with extent {list(target)}")


def _cell_from_json(obj: dict[str, Any]) -> Cell:
    box = obj.get("box")
    return Cell(
        row_start=int(obj["row_start"]),
        row_end=int(obj.get("row_end", obj["row_start"])),
        col_start=int(obj["col_start"]),
        col_end=int(obj.get("col_end", obj["col_start"])),
        box=None if box is None else BBox.from_list(box),
        text=str(obj.get("text", "")),
        is_column_header=bool(obj.get("is_column_header", False)),
        is_projected_row_header=bool(obj.get("is_projected_row_header", False)),
    )


def _replace_cells(table: TableAnnotation, index: int, cell: Cell) -> TableAnnotation:
    cells = list(table.cells)
    cells[index] = cell
    n_rows = max(table.n_rows, cell.row_end + 1)
    n_cols = max(table.n_cols, cell.col_end + 1)
    changes = {"cells": tuple(cells), "n_rows": n_rows, "n_cols": n_cols}
    if n_rows != table.n_rows or n_cols != table.n_cols:
        # row/column boxes no longer line up with the grid
        changes.update(rows=(), columns=())
    return table.with_(**changes)


def split_table(table: TableAnnotation, starts: Sequence[int]) -> list[TableAnnotation]:
    bounds = sorted({int(s) for s in starts})
    if not bounds or bounds[0] <= 0 or bounds[-1] >= table.n_rows:
        raise ResultInvalid(f"{table.table_id}: split rows {list(starts)} outside 1..{table.n_rows - 1}")
    edges = [0] + bounds + [table.n_rows]
    pieces = list(zip(edges, edges[1:]))

    def piece_of(row: int) -> int:
        for p, (lo, hi) in enumerate(pieces):
            if lo <= row < hi:
                return p
        raise AssertionError(row)

    cell_piece = []
    for cell in table.cells:
        p = piece_of(cell.row_start)
        if piece_of(cell.row_end) != p:
            raise ResultInvalid(f"{table.table_id}: cell {list(cell.extent)} crosses a split boundary")
        cell_piece.append(p)

    # words follow the cell they overlap most; stray words follow the nearest piece vertically
    slots = slot_words([c.box for c in table.cells], table.words)
    piece_spans = []
    for p in range(len(pieces)):
        ys = [b for c, q in zip(table.cells, cell_piece) if q == p and (b := c.box) is not None]
        piece_spans.append((min(b.y_min for b in ys), max(b.y_max for b in ys)) if ys else None)
    word_piece = []
    for word, slot in zip(table.words, slots):
        if slot is not None:
            word_piece.append(cell_piece[slot])
            continue
        yc = (word.box.y_min + word.box.y_max) / 2
        best, best_d = 0, float("inf")
        for p, span in enumerate(piece_spans):
            if span is None:
                continue
            d = 0.0 if span[0] <= yc <= span[1] else min(abs(yc - span[0]), abs(yc - span[1]))
            if d < best_d:
                best, best_d = p, d
        word_piece.append(best)

    out = []
    for p, (lo, hi) in enumerate(pieces):
        cells = tuple(
            replace(c, row_start=c.row_start - lo, row_end=c.row_end - lo)
            for c, q in zip(table.cells, cell_piece)
            if q == p
        )
        out.append(
            table.with_(
                table_id=f"{table.table_id}_{p + 1}",
                n_rows=hi - lo,
                cells=cells,
                rows=table.rows[lo:hi] if table.rows else (),
                words=tuple(w for w, q in zip(table.words, word_piece) if q == p),
                markup_header_rows=tuple(r - lo for r in table.markup_header_rows if lo <= r < hi),
            )
        )
    return out


def _apply_ops(table: TableAnnotation, ops: Sequence[dict[str, Any]]) -> list[TableAnnotation]:
    current = [table]
    for op in ops:
        (kind, args), = op.items()
        if len(current) != 1:
            raise CorrectionError(f"{table.table_id}: no ops may follow split_table in the same correction")
        t = current[0]
        if kind == "replace_cell":
            index = _find_cell(t, args["match"])
            current = [_replace_cells(t, index, _cell_from_json(args["new"]))]
        elif kind == "set_text":
            index = _find_cell(t, args["cell"])
            cell = t.cells[index]
            current = [_replace_cells(t, index, replace(cell, text=str(args["text"])))]
        else:
            current = split_table(t, args["rows"])
    return current


def apply_corrections(
    tables: Sequence[TableAnnotation], overlay: Sequence[ManualCorrection]
) -> list[TableAnnotation]:
    """Apply corrections in file order; splits replace a table by its pieces in place."""
    result = list(tables)
    for correction in overlay:
        matches = [k for k, t in enumerate(result) if t.table_id == correction.table_id]
        if not matches:
            raise TargetNotFound(f"no table with id {correction.table_id!r}")
        if len(matches) > 1:
            raise CorrectionError(f"table id {correction.table_id!r} is not unique")
        k = matches[0]
        new_tables = _apply_ops(result[k], correction.ops)
        for t in new_tables:
            try:
                validate(t)
            except TableError as exc:
                raise ResultInvalid(str(exc)) from None
        result[k : k + 1] = new_tables
    return result
