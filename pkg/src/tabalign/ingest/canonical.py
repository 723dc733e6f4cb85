"""Canonical JSON-lines interchange format (one table per line, version "1")."""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Any, Iterable, Iterator

from ..errors import SchemaVersionMismatch, ValidationFailure
from ..geometry import BBox
from ..model import Cell, Column, Provenance, Row, TableAnnotation, Word, validate

SCHEMA_VERSION = "1"


def _box(box: BBox | None):
    return None if box is None else box.to_list()


def table_to_dict(table: TableAnnotation) -> dict[str, Any]:
    return {
        "version": SCHEMA_VERSION,
        "table_id": table.table_id,
        "split": table.split,
        "stage": table.stage,
        "provenance": {
            "dataset": table.provenance.dataset,
            "document_id": table.provenance.document_id,
        },
        "n_rows": table.n_rows,
        "n_cols": table.n_cols,
        "markup_header_rows": list(table.markup_header_rows),
        "rows": [{"box": _box(r.box), "is_column_header": r.is_column_header} for r in table.rows],
        "columns": [{"box": _box(c.box)} for c in table.columns],
        "cells": [
            {
                "row_start": c.row_start,
                "row_end": c.row_end,
                "col_start": c.col_start,
                "col_end": c.col_end,
                "box": _box(c.box),
                "text": c.text,
                "is_column_header": c.is_column_header,
                "is_projected_row_header": c.is_projected_row_header,
            }
            for c in table.cells
        ],
        "words": [{"text": w.text, "box": w.box.to_list()} for w in table.words],
    }


def dumps_table(table: TableAnnotation) -> str:
    return json.dumps(table_to_dict(table), ensure_ascii=False, separators=(",", ":"))


class _Reader:
    """Tracks the field path while decoding so failures can name it."""

    def __init__(self, table_id: str):
        self.table_id = table_id

    def fail(self, path: str, message: str):
        raise ValidationFailure(self.table_id, path, message)

    def get(self, obj: dict, key: str, kind, path: str):
        if not isinstance(obj, dict) or key not in obj:
            self.fail(f"{path}{key}", "missing field")
        value = obj[key]
        if kind is float:
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        elif kind is int:
            ok = isinstance(value, int) and not isinstance(value, bool)
        else:
            ok = isinstance(value, kind)
        if not ok:
            self.fail(f"{path}{key}", f"expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}")
        return value

    def box(self, value, path: str, optional: bool = True) -> BBox | None:
        if value is None:
            if optional:
                return None
            self.fail(path, "box is required")
        if not isinstance(value, list) or len(value) != 4:
            self.fail(path, "box must be a list of 4 numbers")
        try:
            return BBox.from_list(value)
        except (TypeError, ValueError) as exc:
            self.fail(path, str(exc))


def table_from_dict(obj: dict[str, Any], validate_result: bool = True) -> TableAnnotation:
    if not isinstance(obj, dict):
        raise ValidationFailure("?", "", "table record must be a JSON object")
    version = obj.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"expected schema version {SCHEMA_VERSION!r}, got {version!r}")
    tid = obj.get("table_id") if isinstance(obj.get("table_id"), str) else "?"
    rd = _Reader(tid)
    prov = rd.get(obj, "provenance", dict, "")
    rows = [
        Row(
            box=rd.box(rd.get(r, "box", object, f"rows[{i}]."), f"rows[{i}].box"),
            is_column_header=rd.get(r, "is_column_header", bool, f"rows[{i}]."),
        )
        for i, r in enumerate(rd.get(obj, "rows", list, ""))
    ]
    columns = [
        Column(box=rd.box(rd.get(c, "box", object, f"columns[{i}]."), f"columns[{i}].box"))
        for i, c in enumerate(rd.get(obj, "columns", list, ""))
    ]
    cells = []
    for k, c in enumerate(rd.get(obj, "cells", list, "")):
        p = f"cells[{k}]."
        cells.append(
            Cell(
                row_start=rd.get(c, "row_start", int, p),
                row_end=rd.get(c, "row_end", int, p),
                col_start=rd.get(c, "col_start", int, p),
                col_end=rd.get(c, "col_end", int, p),
                box=rd.box(rd.get(c, "box", object, p), p + "box"),
                text=rd.get(c, "text", str, p),
                is_column_header=rd.get(c, "is_column_header", bool, p),
                is_projected_row_header=rd.get(c, "is_projected_row_header", bool, p),
            )
        )
    words = []
    for k, w in enumerate(rd.get(obj, "words", list, "")):
        p = f"words[{k}]."
        text = rd.get(w, "text", str, p)
        if not text.strip():
            rd.fail(p + "text", "word text is empty")
        words.append(Word(text, rd.box(rd.get(w, "box", list, p), p + "box", optional=False)))
    table = TableAnnotation(
        table_id=rd.get(obj, "table_id", str, ""),
        split=rd.get(obj, "split", str, ""),
        stage=rd.get(obj, "stage", str, ""),
        provenance=Provenance(
            dataset=rd.get(prov, "dataset", str, "provenance."),
            document_id=rd.get(prov, "document_id", str, "provenance."),
        ),
        n_rows=rd.get(obj, "n_rows", int, ""),
        n_cols=rd.get(obj, "n_cols", int, ""),
        markup_header_rows=tuple(rd.get(obj, "markup_header_rows", list, "")),
        rows=tuple(rows),
        columns=tuple(columns),
        cells=tuple(cells),
        words=tuple(words),
    )
    return validate(table) if validate_result else table


def iter_canonical(stream: IO[str]) -> Iterator[TableAnnotation]:
    for lineno, line in enumerate(stream, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationFailure("?", f"line {lineno}", f"invalid JSON: {exc}") from None
        yield table_from_dict(obj)


def read_canonical(source: str | Path | IO[str]) -> list[TableAnnotation]:
    if hasattr(source, "read"):
        return list(iter_canonical(source))
    with open(source, encoding="utf-8") as f:
        return list(iter_canonical(f))


def write_canonical(tables: Iterable[TableAnnotation], target: str | Path | IO[str]) -> None:
    if hasattr(target, "write"):
        for table in tables:
            target.write(dumps_table(table) + "\n")
        return
    with open(target, "w", encoding="utf-8", newline="\n") as f:
        write_canonical(tables, f)
