from __future__ import annotations

import json
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from tabalign.cli import main
from tabalign.ingest import read_canonical, write_canonical

from builders import SEED_LEDGER, grid_table, seeded_corpus, write_corpus

ICDAR = Path(__file__).parent / "data" / "icdar"


@pytest.fixture
def seeded(tmp_path):
    return write_corpus(tmp_path / "in", "seeded", seeded_corpus())


def test_process_a6_writes_snapshot_and_reports(seeded, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["process", "--manifest", str(seeded), "--stage", "a6", "--out", str(out), "--jobs", "2"]) == 0
    kept = read_canonical(out / "seeded.a6.jsonl")
    assert len(kept) == SEED_LEDGER["kept"]
    report = json.loads((out / "report.json").read_text())
    assert report["removed_by_reason"] == SEED_LEDGER["removed"]
    assert report["modified_by_change"] == SEED_LEDGER["modified"]
    assert report["ingest_failures"] == []
    assert "kept: 10" in capsys.readouterr().out
    assert (out / "report.txt").read_text().startswith("Pipeline report: seeded (fintabnet mode, target a6)")


def test_process_a1_only_completes(seeded, tmp_path):
    out = tmp_path / "out"
    assert main(["process", "--manifest", str(seeded), "--stage", "A1", "--out", str(out), "--jobs", "1"]) == 0
    totals = json.loads((out / "report.json").read_text())["totals"]
    assert totals == {"input": 12, "kept": 12, "removed": 0, "modified": 0, "flagged": 0, "corrections_applied": 0}
    assert all(t.rows and t.columns for t in read_canonical(out / "seeded.a1.jsonl"))


def test_threshold_override(tmp_path):
    t = grid_table("t", [["Item", "2019"], ["Revenue ....", "1"], ["Costs", "2"]])
    manifest = write_corpus(tmp_path, "one", [t])
    out = tmp_path / "out"
    args = ["process", "--manifest", str(manifest), "--stage", "a3", "--out", str(out), "--jobs", "1"]
    assert main(args) == 0
    assert json.loads((out / "report.json").read_text())["modified_by_change"] == {"DotLeadersStripped": 1}
    assert main(args + ["--set", "dot_leader_min_dots=6"]) == 0
    assert json.loads((out / "report.json").read_text())["modified_by_change"] == {}
    opts = tmp_path / "opts.cfg"
    opts.write_text("dot_leader_min_dots = 6\n")
    assert main(args + ["--options", str(opts)]) == 0
    assert json.loads((out / "report.json").read_text())["modified_by_change"] == {}


def test_icdar_process(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["process", "--manifest", str(ICDAR / "manifest.json"), "--stage", "a3", "--out", str(out), "--jobs", "1"])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["mode"] == "icdar"
    assert report["totals"]["input"] == report["totals"]["kept"] == 4
    assert report["totals"]["corrections_applied"] == 1
    assert report["flags_by_code"] == {"CurrencySplitColumn": 1, "TwoColumnAmbiguous": 1}
    assert "Flagged for review:" in capsys.readouterr().out


def test_unreadable_documents_exit_2(tmp_path, capsys):
    out = tmp_path / "out"
    args = ["process", "--manifest", str(ICDAR / "manifest_with_bad.json"), "--stage", "a1", "--out", str(out), "--jobs", "1"]
    assert main(args) == 2
    assert "unreadable at ingest: 1" in capsys.readouterr().out
    # the readable tables are still processed
    assert len(read_canonical(out / "icdar2013.a1.jsonl")) == 4
    assert main(args + ["--max-failures", "1"]) == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["process", "--manifest", "{seeded}", "--stage", "a9", "--out", "{out}"],
        ["process", "--manifest", str(ICDAR / "manifest.json"), "--stage", "a4", "--out", "{out}"],
        ["process", "--manifest", "{seeded}", "--stage", "a1", "--out", "{out}", "--set", "nonsense=1"],
        ["process", "--manifest", "{out}/missing.json", "--stage", "a1", "--out", "{out}"],
        ["process", "--stage", "a1"],
        ["stats", "--in", "{empty}"],
        ["render", "--in", "{data}", "--table", "clean-0", "--layers", "rows,bogus"],
        ["render", "--in", "{data}", "--table", "nope"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_1(argv, seeded, tmp_path):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    fill = {"seeded": str(seeded), "out": str(tmp_path / "o"), "empty": str(empty), "data": str(seeded.parent / "seeded.jsonl")}
    argv = [a.format(**fill) for a in argv]
    with pytest.raises(SystemExit) as err:
        raise SystemExit(main(argv))
    assert err.value.code == 1


def test_evaluate(tmp_path, capsys):
    gt = [grid_table("a", [["a", "b"], ["c", "12"]]), grid_table("b", [["x"]])]
    pred = [grid_table("a", [["a", "b"], ["c", "13"]])]
    write_canonical(gt, tmp_path / "gt.jsonl")
    write_canonical(pred, tmp_path / "pred.jsonl")
    out = tmp_path / "m"
    assert main(["evaluate", "--gt", str(tmp_path / "gt.jsonl"), "--pred", str(tmp_path / "pred.jsonl"), "--out", str(out), "--jobs", "1"]) == 0
    summary = json.loads((out / "metrics.json").read_text())["summary"]
    assert summary["grits_con"] == pytest.approx(0.4375)
    assert summary["acc_con"] == 0.0
    assert (out / "metrics.csv").read_text().splitlines()[0].startswith("table_id,grits_con")
    assert "GriTS_Con" in capsys.readouterr().out
    write_canonical(pred + pred, tmp_path / "dup.jsonl")
    assert main(["evaluate", "--gt", str(tmp_path / "gt.jsonl"), "--pred", str(tmp_path / "dup.jsonl")]) == 1


def test_stats(tmp_path, capsys):
    write_canonical(seeded_corpus(), tmp_path / "seeded.jsonl")
    assert main(["stats", "--in", str(tmp_path / "seeded.jsonl"), "--out", str(tmp_path / "s")]) == 0
    data = json.loads((tmp_path / "s" / "stats.json").read_text())
    assert data["seeded.jsonl"]["n_tables"] == 12
    assert capsys.readouterr().out == (tmp_path / "s" / "stats.txt").read_text()


def test_render_layers(seeded, tmp_path):
    out = tmp_path / "o"
    main(["process", "--manifest", str(seeded), "--stage", "a2", "--out", str(out), "--jobs", "1"])
    svg_path = tmp_path / "t.svg"
    snapshot = str(out / "seeded.a2.jsonl")
    assert main(["render", "--in", snapshot, "--table", "clean-1", "--layers", "rows,columns,cells,words", "--out", str(svg_path)]) == 0
    root = ET.fromstring(svg_path.read_text())
    ns = "{http://www.w3.org/2000/svg}"
    counts = {g.get("id"): len(g.findall(f"{ns}rect")) for g in root.findall(f"{ns}g")}
    table = next(t for t in read_canonical(snapshot) if t.table_id == "clean-1")
    assert counts == {
        "layer-rows": table.n_rows,
        "layer-columns": table.n_cols,
        "layer-cells": len(table.cells),
        "layer-words": len(table.words),
    }


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "tabalign", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "process" in proc.stdout


def test_outputs_identical_across_runs_and_jobs(seeded, tmp_path):
    outputs = []
    for k, jobs in enumerate(("1", "1", "8")):
        out = tmp_path / f"run{k}"
        assert main(["process", "--manifest", str(seeded), "--stage", "a6", "--out", str(out), "--jobs", jobs]) == 0
        svg = out / "t.svg"
        main(["render", "--in", str(out / "seeded.a6.jsonl"), "--table", "dot-leader-0", "--layers", ",".join(["rows", "columns", "cells", "words", "header"]), "--out", str(svg)])
        outputs.append([(out / n).read_bytes() for n in ("seeded.a6.jsonl", "report.json", "report.txt", "t.svg")])
    assert outputs[0] == outputs[1] == outputs[2]
