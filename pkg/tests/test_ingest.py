from __future__ import annotations

import io
import json
import random
from pathlib import Path

import pytest

from tabalign.errors import (
    BoxCountMismatch,
    CorrectionError,
    ManifestError,
    MissingIndex,
    ResultInvalid,
    SchemaVersionMismatch,
    TargetNotFound,
    TokenStreamInvalid,
    ValidationFailure,
)
from tabalign.geometry import BBox
from tabalign.ingest import (
    apply_corrections,
    load_dataset,
    load_manifest,
    parse_fintabnet_lines,
    parse_fintabnet_record,
    parse_icdar_xml,
    parse_overlay,
    place_html_cells,
    read_canonical,
    split_table,
    synthesize_words,
    table_from_dict,
    table_to_dict,
    write_canonical,
)
from tabalign.ingest.manifest import manifest_from_dict
from tabalign.model import Cell, Provenance, TableAnnotation, Word

from builders import grid_table, random_corpus

DATA = Path(__file__).parent / "data"
ICDAR = DATA / "icdar"


# canonical JSON lines ---------------------------------------------------------


def test_canonical_round_trip_random():
    tables = random_corpus(5, 200, full=True)
    buf = io.StringIO()
    write_canonical(tables, buf)
    buf.seek(0)
    assert read_canonical(buf) == tables


def test_canonical_is_byte_stable(tmp_path):
    tables = random_corpus(6, 20, full=True)
    write_canonical(tables, tmp_path / "a.jsonl")
    write_canonical(read_canonical(tmp_path / "a.jsonl"), tmp_path / "b.jsonl")
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()


def test_canonical_rejects_wrong_version():
    obj = table_to_dict(grid_table("t", [["a"]]))
    obj["version"] = "99"
    with pytest.raises(SchemaVersionMismatch):
        table_from_dict(obj)


def test_canonical_reports_field_path():
    obj = table_to_dict(grid_table("t", [["a", "b"]]))
    obj["cells"][1]["col_start"] = "one"
    with pytest.raises(ValidationFailure) as err:
        table_from_dict(obj)
    assert err.value.path == "cells[1].col_start"


# ICDAR-2013 XML ---------------------------------------------------------------


def _icdar(name: str, **kwargs):
    heights = json.loads((ICDAR / "page_heights.json").read_text())
    doc = name.removesuffix("-str.xml")
    pages = {int(k): v for k, v in heights[doc].items()}
    return parse_icdar_xml((ICDAR / name).read_bytes(), pages, document_id=doc, **kwargs)


def test_icdar_hand_specified_table():
    tables = _icdar("us-001-str.xml")
    assert [t.table_id for t in tables] == ["us-001-1-1", "us-001-2-1"]
    t = tables[0]
    assert (t.n_rows, t.n_cols, t.split, t.stage) == (3, 3, "test", "raw")
    assert t.provenance == Provenance("icdar2013", "us-001")
    expected = [
        Cell(0, 0, 0, 0, BBox(50, 82, 74, 92), "Item"),
        Cell(0, 0, 1, 1, BBox(150, 82, 174, 92), "2019"),
        Cell(0, 0, 2, 2, BBox(250, 82, 274, 92), "2020"),
        Cell(1, 1, 0, 0, BBox(50, 102, 80, 112), "Sales total"),
        Cell(1, 1, 1, 1, BBox(150, 102, 162, 112), "10"),
        Cell(1, 1, 2, 2, BBox(250, 102, 262, 112), "12"),
        Cell(2, 2, 0, 0, BBox(50, 122, 80, 132), "Costs"),
        Cell(2, 2, 1, 1, BBox(150, 122, 156, 132), "4"),
        Cell(2, 2, 2, 2, BBox(250, 122, 256, 132), "5"),
    ]
    assert list(t.cells) == expected
    # "Sales total": 5 + 1 + 5 characters over a 30-unit box
    sales = [w for w in t.words if w.box.y_min == 102 and w.box.x_min < 100]
    assert sales == [
        Word("Sales", BBox(50, 102, 50 + 30 * 5 / 11, 112)),
        Word("total", BBox(50 + 30 * 6 / 11, 102, 80, 112)),
    ]
    assert len(t.words) == 10


def test_icdar_spanning_and_multi_region():
    tables = _icdar("eu-002-str.xml")
    assert [t.table_id for t in tables] == ["eu-002-1-1", "eu-002-1-2"]
    first = tables[0]
    assert (first.n_rows, first.n_cols) == (5, 3)
    assert first.cells[0] == Cell(0, 0, 1, 2, BBox(150, 82, 186, 92), "Amount")


def test_icdar_page_words_filter():
    inside = Word("Item", BBox(50, 82, 74, 92))
    outside = Word("Footnote", BBox(50, 400, 90, 410))
    t = _icdar("us-001-str.xml", words={1: [inside, outside]})[0]
    assert t.words == (inside,)


def test_icdar_malformed_and_missing_index():
    from tabalign.errors import MalformedXml

    with pytest.raises(MalformedXml):
        _icdar("bad-003-str.xml")
    xml = '<document><table id="1"><region id="1" page="1"><cell start-col="0"><content>x</content></cell></region></table></document>'
    with pytest.raises(MissingIndex):
        parse_icdar_xml(xml, {1: 792.0})
    failures = []
    assert parse_icdar_xml(xml, {1: 792.0}, failures=failures) == []
    assert [f.reason for f in failures] == ["MissingIndex"]


def test_icdar_missing_end_index_defaults_to_start():
    xml = (
        '<document><table><region page="1"><cell start-row="0" start-col="0" end-col="1">'
        '<bounding-box x1="0" y1="0" x2="10" y2="10"/><content>a</content></cell></region></table></document>'
    )
    (t,) = parse_icdar_xml(xml, {1: 100.0})
    assert t.cells[0].extent == (0, 0, 0, 1)
    assert t.cells[0].box == BBox(0, 90, 10, 100)


# FinTabNet HTML tokens --------------------------------------------------------


def _chars(text: str) -> list[str]:
    return list(text)


HAND_RECORD = {
    "table_id": "ft-1",
    "filename": "ABC/2015/page_12.pdf",
    "split": "val",
    "html": {
        "structure": {
            "tokens": [
                "<thead>", "<tr>", "<td>", "</td>", "<td", ' colspan="2"', ">", "</td>", "</tr>",
                "<tr>", "<td>", "</td>", "<td>", "</td>", "<td>", "</td>", "</tr>", "</thead>",
                "<tbody>", "<tr>", "<td", ' rowspan="2"', ">", "</td>", "<td>", "</td>", "<td>", "</td>", "</tr>",
                "<tr>", "<td>", "</td>", "<td>", "</td>", "</tr>", "</tbody>",
            ]
        },
        "cells": [
            {"tokens": []},
            {"tokens": ["<b>", *_chars("Amount"), "</b>"], "bbox": [150, 10, 186, 20]},
            {"tokens": _chars("Item"), "bbox": [50, 30, 74, 40]},
            {"tokens": _chars("2019"), "bbox": [150, 30, 174, 40]},
            {"tokens": _chars("2020"), "bbox": [250, 30, 274, 40]},
            {"tokens": _chars("Sales"), "bbox": [50, 50, 80, 80]},
            {"tokens": _chars("10"), "bbox": [150, 50, 162, 60]},
            {"tokens": _chars("12"), "bbox": [250, 50, 262, 60]},
            {"tokens": _chars("11"), "bbox": [150, 70, 162, 80]},
            {"tokens": _chars("13"), "bbox": [250, 70, 262, 80]},
        ],
    },
}


def test_fintabnet_hand_specified_record():
    t = parse_fintabnet_record(HAND_RECORD)
    assert (t.table_id, t.split, t.n_rows, t.n_cols) == ("ft-1", "val", 4, 3)
    assert t.markup_header_rows == (0, 1)
    assert t.provenance == Provenance("fintabnet", "ABC/2015/page_12.pdf")
    assert [(c.extent, c.text) for c in t.cells] == [
        ((0, 0, 1, 2), "Amount"),
        ((1, 1, 0, 0), "Item"),
        ((1, 1, 1, 1), "2019"),
        ((1, 1, 2, 2), "2020"),
        ((2, 3, 0, 0), "Sales"),
        ((2, 2, 1, 1), "10"),
        ((2, 2, 2, 2), "12"),
        ((3, 3, 1, 1), "11"),
        ((3, 3, 2, 2), "13"),
    ]
    assert t.cells[4].box == BBox(50, 50, 80, 80)


def test_fintabnet_flip_with_page_height():
    t = parse_fintabnet_record({**HAND_RECORD, "page_height": 100})
    assert t.cells[0].box == BBox(150, 80, 186, 90)


def _emit_tokens(n_rows: int, cells: list[tuple[int, int, int, int]], header_rows: int) -> list[str]:
    tokens = []
    if header_rows:
        tokens.append("<thead>")
    for r in range(n_rows):
        if r == header_rows and header_rows:
            tokens += ["</thead>", "<tbody>"]
        tokens.append("<tr>")
        for r0, r1, c0, c1 in sorted((c for c in cells if c[0] == r), key=lambda c: c[2]):
            if r1 == r0 and c1 == c0:
                tokens.append("<td>")
            else:
                tokens.append("<td")
                if r1 > r0:
                    tokens.append(f' rowspan="{r1 - r0 + 1}"')
                if c1 > c0:
                    tokens.append(f' colspan="{c1 - c0 + 1}"')
                tokens.append(">")
            tokens.append("</td>")
        tokens.append("</tr>")
    return tokens


def _random_partition(rng: random.Random):
    n_rows, n_cols = rng.randint(1, 6), rng.randint(1, 6)
    taken = set()
    cells = []
    for i in range(n_rows):
        for j in range(n_cols):
            if (i, j) in taken:
                continue
            h = rng.randint(1, n_rows - i)
            w = 1
            while w < n_cols - j and (i, j + w) not in taken and rng.random() < 0.4:
                w += 1
            if any((a, b) in taken for a in range(i, i + h) for b in range(j, j + w)):
                h = 1
            if rng.random() < 0.6:
                h = 1
            for a in range(i, i + h):
                for b in range(j, j + w):
                    taken.add((a, b))
            cells.append((i, i + h - 1, j, j + w - 1))
    return n_rows, n_cols, cells


def test_html_placement_matches_generated_partitions():
    """Row-major emission of a known partition must place back onto it."""
    rng = random.Random(2024)
    for _ in range(500):
        n_rows, n_cols, cells = _random_partition(rng)
        header = rng.randint(0, n_rows - 1)
        placed, r, c = place_html_cells(_emit_tokens(n_rows, cells, header))
        assert (r, c) == (n_rows, n_cols)
        got = sorted((p.row, p.row + p.rowspan - 1, p.col, p.col + p.colspan - 1) for p in placed)
        assert got == sorted(cells)
        assert all(p.in_header == (p.row < header) for p in placed)


@pytest.mark.parametrize(
    "tokens",
    [
        ["<tr>", "<td>", "</tr>"],
        ["<td>", "</td>"],
        ["<tr>", "<div>", "</tr>"],
        ["<tr>", "<td", ' rowspan="3"', ">", "</td>", "</tr>"],
        ["<tr>", "<td", ' colspan="x"', ">", "</td>", "</tr>"],
    ],
)
def test_html_invalid_streams(tokens):
    with pytest.raises(TokenStreamInvalid):
        place_html_cells(tokens)


def test_fintabnet_box_count_mismatch():
    record = json.loads(json.dumps(HAND_RECORD))
    record["html"]["cells"].pop()
    with pytest.raises(BoxCountMismatch):
        parse_fintabnet_record(record)
    record = json.loads(json.dumps(HAND_RECORD))
    del record["html"]["cells"][2]["bbox"]
    with pytest.raises(BoxCountMismatch):
        parse_fintabnet_record(record)


def test_fintabnet_lines_collect_failures_in_order():
    bad = json.loads(json.dumps(HAND_RECORD))
    bad["table_id"] = "ft-bad"
    bad["html"]["structure"]["tokens"] = ["<tr>", "<span>", "</tr>"]
    good2 = {**HAND_RECORD, "table_id": "ft-2"}
    lines = [
        ("a.jsonl", 0, json.dumps(HAND_RECORD)),
        ("a.jsonl", 1, "{not json"),
        ("a.jsonl", 2, json.dumps(bad)),
        ("a.jsonl", 3, json.dumps(good2)),
        ("a.jsonl", 4, "   "),
    ]
    tables, failures = parse_fintabnet_lines(lines)
    assert [t.table_id for t in tables] == ["ft-1", "ft-2"]
    assert [(f.source, f.reason) for f in failures] == [("a.jsonl:1", "InvalidJson"), ("a.jsonl:2", "TokenStreamInvalid")]
    assert parse_fintabnet_lines(lines, jobs=3) == (tables, failures)


# words ------------------------------------------------------------------------


def test_synthesized_words_cover_the_cell_box():
    cell = Cell(0, 0, 0, 0, BBox(10, 0, 43, 5), "ab cde f")
    words = synthesize_words([cell, Cell(0, 0, 1, 1, None, "")])
    assert [w.text for w in words] == ["ab", "cde", "f"]
    assert words[0].box.x_min == 10 and words[-1].box.x_max == 43
    assert all(a.box.x_max < b.box.x_min for a, b in zip(words, words[1:]))


# corrections ------------------------------------------------------------------


def _stacked() -> TableAnnotation:
    return grid_table("stack", [["A", "B"], ["1", "2"], ["C", "D"], ["3", "4"]], markup_header_rows=(0, 2))


def test_split_table_pieces():
    one, two = split_table(_stacked(), [2])
    assert (one.table_id, two.table_id) == ("stack_1", "stack_2")
    assert [c.text for c in two.cells] == ["C", "D", "3", "4"]
    assert two.cells[0].extent == (0, 0, 0, 0)
    assert two.markup_header_rows == (0,)
    assert {w.text for w in one.words} == {"A", "B", "1", "2"}
    assert {w.text for w in two.words} == {"C", "D", "3", "4"}


def test_split_through_a_span_is_rejected():
    t = TableAnnotation("t", 3, 1, (Cell(0, 1, 0, 0, text="x"), Cell(2, 2, 0, 0, text="y")))
    with pytest.raises(ResultInvalid):
        split_table(t, [1])


def test_apply_corrections():
    overlay = parse_overlay(
        {
            "version": "1",
            "corrections": [
                {"table_id": "stack", "ops": [{"set_text": {"cell": [1, 1, 0, 0], "text": "one"}}]},
                {"table_id": "stack", "ops": [{"split_table": {"rows": [2]}}]},
                {
                    "table_id": "stack_2",
                    "ops": [{"replace_cell": {"match": [1, 1, 1, 1], "new": {"row_start": 1, "col_start": 1, "text": "four"}}}],
                },
            ],
        }
    )
    out = apply_corrections([_stacked()], overlay)
    assert [t.table_id for t in out] == ["stack_1", "stack_2"]
    assert out[0].cells[2].text == "one"
    assert out[1].cells[3].text == "four" and out[1].cells[3].box is None
    with pytest.raises(TargetNotFound):
        apply_corrections([_stacked()], parse_overlay([{"table_id": "nope", "ops": []}]))
    with pytest.raises(CorrectionError):
        parse_overlay([{"table_id": "stack", "ops": [{"explode": {}}]}])


# manifests --------------------------------------------------------------------


def test_manifest_validation(tmp_path):
    with pytest.raises(ManifestError):
        manifest_from_dict({"kind": "pdf", "annotations": ["x"]}, tmp_path)
    with pytest.raises(ManifestError):
        manifest_from_dict({"kind": "canonical", "annotations": ["missing.jsonl"]}, tmp_path)
    with pytest.raises(ManifestError):
        manifest_from_dict({"kind": "icdar", "annotations": ["a.xml"]}, tmp_path)
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "none.json")


def test_icdar_manifest_counts_unreadable_documents():
    tables, failures = load_dataset(load_manifest(ICDAR / "manifest_with_bad.json"))
    assert len(tables) == 4
    assert [(f.source, f.reason) for f in failures] == [("bad-003-str.xml", "MalformedXml")]
