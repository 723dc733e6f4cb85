"""Deterministic SVG overlays of table annotations."""

from __future__ import annotations

from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .errors import UnknownLayer, UnknownTable
from .geometry import BBox, union_all
from .grid import cell_region
from .model import TableAnnotation

LAYERS = ("rows", "columns", "cells", "words", "header", "projected")

# cyclic column shading
PALETTE = ("#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#ff9da7")

STYLE = {
    "rows": 'fill="none" stroke="#444444" stroke-width="0.6"',
    "cells": 'fill="none" stroke="#d62728" stroke-width="0.8"',
    "words": 'fill="#1f77b4" fill-opacity="0.15" stroke="#1f77b4" stroke-width="0.4"',
    "header": 'fill="#9467bd" fill-opacity="0.25" stroke="none"',
    "projected": 'fill="#2ca02c" fill-opacity="0.25" stroke="none"',
}


def parse_layers(names: str | Sequence[str]) -> tuple[str, ...]:
    names = [s.strip() for s in names.split(",")] if isinstance(names, str) else list(names)
    names = [n for n in names if n]
    for name in names:
        if name not in LAYERS:
            raise UnknownLayer(f"unknown layer {name!r}; choose from {', '.join(LAYERS)}")
    return tuple(dict.fromkeys(names))


def _cell_box(table: TableAnnotation, cell) -> BBox | None:
    return cell.box or cell_region(table, cell)


def layer_boxes(table: TableAnnotation, layer: str) -> list[tuple[str, BBox]]:
    """(label, box) for every element of a layer that has a box."""
    if layer == "rows":
        items = [(f"row {i}", r.box) for i, r in enumerate(table.rows)]
    elif layer == "columns":
        items = [(f"column {j}", c.box) for j, c in enumerate(table.columns)]
    elif layer == "words":
        items = [(w.text, w.box) for w in table.words]
    else:
        pick = {
            "cells": lambda c: True,
            "header": lambda c: c.is_column_header,
            "projected": lambda c: c.is_projected_row_header,
        }
        if layer not in pick:
            raise UnknownLayer(f"unknown layer {layer!r}")
        items = [(c.text or "(blank)", _cell_box(table, c)) for c in table.cells if pick[layer](c)]
    return [(label, box) for label, box in items if box is not None]


def _num(v: float) -> str:
    return f"{v:.2f}"


def render_svg(table: TableAnnotation, layers: Iterable[str], margin: float = 10.0) -> str:
    layers = parse_layers(list(layers))
    drawn = {layer: layer_boxes(table, layer) for layer in layers}
    frame = union_all(b for items in drawn.values() for _, b in items)
    if frame is None:
        frame = union_all([r.box for r in table.rows] + [c.box for c in table.cells]) or BBox(0, 0, 1, 1)
    x0, y0 = frame.x_min - margin, frame.y_min - margin
    w, h = frame.width + 2 * margin, frame.height + 2 * margin

    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_num(x0)} {_num(y0)} {_num(w)} {_num(h)}" width="{_num(w)}" height="{_num(h)}">',
        f"<title>{escape(table.table_id)}</title>",
    ]
    for layer in layers:
        out.append(f'<g id="layer-{layer}">')
        for k, (label, box) in enumerate(drawn[layer]):
            if layer == "columns":
                style = f'fill="{PALETTE[k % len(PALETTE)]}" fill-opacity="0.3" stroke="none"'
            else:
                style = STYLE[layer]
            out.append(
                f'<rect id="{layer}-{k}" x="{_num(box.x_min)}" y="{_num(box.y_min)}" '
                f'width="{_num(box.width)}" height="{_num(box.height)}" {style}>'
                f"<title>{escape(label)}</title></rect>"
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def find_table(tables: Iterable[TableAnnotation], table_id: str) -> TableAnnotation:
    for table in tables:
        if table.table_id == table_id:
            return table
    raise UnknownTable(f"no table with id {table_id!r}")


__all__ = ["LAYERS", "PALETTE", "find_table", "layer_boxes", "parse_layers", "render_svg"]
