"""ICDAR-2013 competition structure XML.

Each ``<region>`` of each ``<table>`` becomes one table.  Cell indices are
inclusive and 0-based in the source; boxes are PDF points with a
bottom-left origin and are flipped using the page height.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from typing import Mapping, Sequence

from ..errors import IngestError, MalformedXml, MissingIndex, TableError
from ..geometry import BBox, union_all
from ..model import Cell, Provenance, TableAnnotation, Word, validate
from .failures import IngestFailure
from .words import synthesize_words

log = logging.getLogger(__name__)


def _int_attr(elem: ET.Element, name: str) -> int | None:
    value = elem.get(name)
    if value is None or not value.strip():
        return None
    return int(value)


def _parse_region(
    region: ET.Element,
    table_id: str,
    page_heights: Mapping[int, float],
    page_words: Sequence[Word] | None,
    document_id: str,
    split: str,
) -> TableAnnotation:
    page = _int_attr(region, "page")
    if page is None or page not in page_heights:
        raise IngestError(f"{table_id}: no page height for page {page}")
    height = float(page_heights[page])

    cells = []
    for k, elem in enumerate(region.iter("cell")):
        try:
            start_row = _int_attr(elem, "start-row")
            start_col = _int_attr(elem, "start-col")
            end_row = _int_attr(elem, "end-row")
            end_col = _int_attr(elem, "end-col")
        except ValueError as exc:
            raise MissingIndex(f"{table_id}: cell {k} has a non-integer index: {exc}") from None
        if start_row is None or start_col is None:
            raise MissingIndex(f"{table_id}: cell {k} lacks start-row/start-col")
        end_row = start_row if end_row is None else end_row
        end_col = start_col if end_col is None else end_col

        box = None
        bb = elem.find("bounding-box")
        if bb is not None:
            try:
                box = BBox(
                    float(bb.get("x1")), float(bb.get("y1")), float(bb.get("x2")), float(bb.get("y2"))
                ).flip_y(height)
            except (TypeError, ValueError) as exc:
                raise IngestError(f"{table_id}: cell {k} has a bad bounding box: {exc}") from None
        content = elem.find("content")
        text = " ".join((content.text or "").split()) if content is not None else ""
        cells.append(Cell(start_row, end_row, start_col, end_col, box=box if text else None, text=text))

    if not cells:
        raise IngestError(f"{table_id}: region has no cells")
    n_rows = 1 + max(c.row_end for c in cells)
    n_cols = 1 + max(c.col_end for c in cells)

    region_box = union_all(c.box for c in cells)
    if page_words is None:
        words = synthesize_words(cells)
    elif region_box is None:
        words = []
    else:
        words = [w for w in page_words if w.box.area > 0 and w.box.intersection_area(region_box) >= 0.5 * w.box.area]

    table = TableAnnotation(
        table_id=table_id,
        split=split,
        n_rows=n_rows,
        n_cols=n_cols,
        cells=tuple(cells),
        words=tuple(words),
        stage="raw",
        provenance=Provenance("icdar2013", document_id),
    )
    try:
        return validate(table)
    except TableError as exc:
        raise IngestError(str(exc)) from None


def parse_icdar_xml(
    data: bytes | str,
    page_heights: Mapping[int, float],
    words: Mapping[int, Sequence[Word]] | Sequence[Word] | None = None,
    *,
    document_id: str = "doc",
    split: str = "test",
    failures: list[IngestFailure] | None = None,
) -> list[TableAnnotation]:
    """Parse one structure XML document into tables, one per region.

    Regions that cannot be read raise, unless ``failures`` is given, in which
    case they are recorded there and skipped.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise MalformedXml(f"{document_id}: {exc}") from None

    tables = []
    for t_index, table_elem in enumerate(root.iter("table")):
        t_id = table_elem.get("id", str(t_index + 1))
        for r_index, region in enumerate(table_elem.iter("region")):
            r_id = region.get("id", str(r_index + 1))
            table_id = f"{document_id}-{t_id}-{r_id}"
            if words is None:
                page_words = None
            elif isinstance(words, Mapping):
                page_words = words.get(_int_attr(region, "page"), [])
            else:
                page_words = words
            try:
                tables.append(_parse_region(region, table_id, page_heights, page_words, document_id, split))
            except IngestError as exc:
                if failures is None:
                    raise
                log.warning("skipping unreadable table %s: %s", table_id, exc)
                failures.append(IngestFailure(table_id, exc.reason, str(exc)))
    return tables
