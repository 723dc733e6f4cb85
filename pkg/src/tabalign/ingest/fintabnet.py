"""FinTabNet-style JSON-lines records (HTML structure tokens plus per-cell boxes)."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from functools import partial
from typing import Any, Iterable, Mapping, Sequence

from ..errors import BoxCountMismatch, IngestError, TableError, TokenStreamInvalid
from ..geometry import BBox
from ..model import Cell, Provenance, TableAnnotation, Word, validate
from ..parallel import ordered_map
from .failures import IngestFailure
from .words import synthesize_words

log = logging.getLogger(__name__)

_SPAN_ATTR = re.compile(r'^\s*(rowspan|colspan)\s*=\s*"?(\d+)"?\s*$')
_TAG = re.compile(r"<[^>]*>")
_IGNORED = {"<table>", "</table>", "<tbody>", "</tbody>"}


@dataclass(frozen=True)
class HtmlCell:
    row: int
    col: int
    rowspan: int
    colspan: int
    in_header: bool


def _scan_tokens(tokens: Sequence[str]) -> tuple[list[list[tuple[int, int]]], list[bool]]:
    """Split the token stream into rows of (rowspan, colspan) plus per-row header flags."""
    rows: list[list[tuple[int, int]]] = []
    header_flags: list[bool] = []
    current: list[tuple[int, int]] | None = None
    pending: dict[str, int] | None = None
    open_td = False
    in_head = False
    for tok in tokens:
        if pending is not None:
            if tok == ">":
                current.append((pending["rowspan"], pending["colspan"]))
                pending, open_td = None, True
                continue
            m = _SPAN_ATTR.match(tok)
            if not m:
                raise TokenStreamInvalid(f"unexpected token {tok!r} inside <td")
            value = int(m.group(2))
            if value < 1:
                raise TokenStreamInvalid(f"{m.group(1)} must be positive")
            pending[m.group(1)] = value
            continue
        if tok in _IGNORED:
            continue
        if tok == "<thead>":
            in_head = True
        elif tok == "</thead>":
            in_head = False
        elif tok == "<tr>":
            if current is not None:
                raise TokenStreamInvalid("nested <tr>")
            current = []
        elif tok == "</tr>":
            if current is None or open_td:
                raise TokenStreamInvalid("unbalanced </tr>")
            rows.append(current)
            header_flags.append(in_head)
            current = None
        elif tok in ("<td>", "<th>"):
            if current is None or open_td:
                raise TokenStreamInvalid("<td> outside a row")
            current.append((1, 1))
            open_td = True
        elif tok in ("<td", "<th"):
            if current is None or open_td:
                raise TokenStreamInvalid("<td> outside a row")
            pending = {"rowspan": 1, "colspan": 1}
        elif tok in ("</td>", "</th>"):
            if not open_td:
                raise TokenStreamInvalid("unbalanced </td>")
            open_td = False
        else:
            raise TokenStreamInvalid(f"unexpected token {tok!r}")
    if current is not None or pending is not None or open_td:
        raise TokenStreamInvalid("token stream ends inside a row")
    if not rows:
        raise TokenStreamInvalid("no rows")
    return rows, header_flags


def place_html_cells(tokens: Sequence[str]) -> tuple[list[HtmlCell], int, int]:
    """Expand structure tokens into grid positions.

    Each cell goes to the first position in its row not already claimed by a
    rowspan from above.  Returns the cells in token order and the grid shape.
    """
    rows, header_flags = _scan_tokens(tokens)
    n_rows = len(rows)
    occupied: set[tuple[int, int]] = set()
    placed = []
    for r, row in enumerate(rows):
        c = 0
        for rowspan, colspan in row:
            while (r, c) in occupied:
                c += 1
            if r + rowspan > n_rows:
                raise TokenStreamInvalid(f"rowspan {rowspan} at row {r} runs past the last row")
            for i in range(r, r + rowspan):
                for j in range(c, c + colspan):
                    if (i, j) in occupied:
                        raise TokenStreamInvalid(f"cell at ({r},{c}) overlaps a spanning cell at ({i},{j})")
                    occupied.add((i, j))
            placed.append(HtmlCell(r, c, rowspan, colspan, header_flags[r]))
            c += colspan
    if not placed:
        raise TokenStreamInvalid("no cells")
    n_cols = max(cell.col + cell.colspan for cell in placed)
    return placed, n_rows, n_cols


def _cell_text(tokens: Sequence[str]) -> str:
    return " ".join(_TAG.sub("", "".join(tokens)).split())


def parse_fintabnet_record(
    record: Mapping[str, Any],
    words: Sequence[Word] | None = None,
    page_height: float | None = None,
) -> TableAnnotation:
    try:
        html = record["html"]
        structure = html["structure"]["tokens"]
        source_cells = html["cells"]
    except (KeyError, TypeError):
        raise IngestError("record lacks html.structure.tokens or html.cells") from None
    table_id = str(record.get("table_id", record.get("imgid", "")))
    if not table_id:
        raise IngestError("record lacks a table_id")

    placed, n_rows, n_cols = place_html_cells(structure)
    if len(placed) != len(source_cells):
        raise BoxCountMismatch(
            f"{table_id}: {len(placed)} cells in structure but {len(source_cells)} cell records"
        )
    if page_height is None:
        page_height = record.get("page_height")

    cells = []
    for k, (pos, src) in enumerate(zip(placed, source_cells)):
        text = _cell_text(src.get("tokens", []))
        raw_box = src.get("bbox")
        if text and not raw_box:
            raise BoxCountMismatch(f"{table_id}: non-blank cell {k} has no box")
        box = None
        if text:
            try:
                box = BBox.from_list(raw_box)
            except (TypeError, ValueError) as exc:
                raise IngestError(f"{table_id}: cell {k} has a bad box: {exc}") from None
            if page_height is not None:
                box = box.flip_y(float(page_height))
        if not text and pos.rowspan == 1 and pos.colspan == 1:
            # plain blank positions are synthesized by the grid
            continue
        cells.append(
            Cell(
                pos.row,
                pos.row + pos.rowspan - 1,
                pos.col,
                pos.col + pos.colspan - 1,
                box=box,
                text=text,
            )
        )

    header_rows = sorted({p.row + d for p in placed if p.in_header for d in range(p.rowspan)})
    table = TableAnnotation(
        table_id=table_id,
        split=str(record.get("split", "train")),
        n_rows=n_rows,
        n_cols=n_cols,
        cells=tuple(cells),
        words=tuple(words if words is not None else synthesize_words(cells)),
        stage="raw",
        provenance=Provenance("fintabnet", str(record.get("filename", ""))),
        markup_header_rows=tuple(header_rows),
    )
    try:
        return validate(table)
    except TableError as exc:
        raise IngestError(str(exc)) from None


def _parse_line(item, words_by_id):
    source, index, line = item
    try:
        record = json.loads(line)
        tid = str(record.get("table_id", "")) if isinstance(record, dict) else ""
        words = None
        if isinstance(words_by_id, Mapping):
            words = words_by_id.get(tid)
        return parse_fintabnet_record(record, words=words), None
    except json.JSONDecodeError as exc:
        return None, IngestFailure(f"{source}:{index}", "InvalidJson", str(exc))
    except IngestError as exc:
        return None, IngestFailure(f"{source}:{index}", exc.reason, str(exc))


def parse_fintabnet_lines(
    lines: Iterable[tuple[str, int, str]],
    words_by_id: Mapping[str, Sequence[Word]] | None = None,
    jobs: int = 1,
) -> tuple[list[TableAnnotation], list[IngestFailure]]:
    """Parse (source, record index, line) triples; output keeps input order."""
    items = [item for item in lines if item[2].strip()]
    results = ordered_map(partial(_parse_line, words_by_id=words_by_id), items, jobs)
    tables, failures = [], []
    for table, failure in results:
        if failure is not None:
            log.warning("skipping unreadable record %s: %s", failure.source, failure.detail)
            failures.append(failure)
        else:
            tables.append(table)
    return tables, failures
