"""Exact match and corpus-level evaluation."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from typing import Sequence

from ..errors import DuplicatePrediction, EmptyDataset, JoinError
from ..model import TableAnnotation
from ..parallel import ordered_map
from .dar import dar_con
from .grits import as_grid, grits
from .similarity import normalize_text

SCORE_FIELDS = ("grits_con", "grits_loc", "grits_top", "dar_con")


def exact_match(gt, pred) -> bool:
    """Same dimensions, and identical text and span layout at every position."""
    gt, pred = as_grid(gt), as_grid(pred)
    if (gt.n_rows, gt.n_cols) != (pred.n_rows, pred.n_cols):
        return False
    for row_a, row_b in zip(gt.entries, pred.entries):
        for a, b in zip(row_a, row_b):
            if a.rel_extent != b.rel_extent or normalize_text(a.text) != normalize_text(b.text):
                return False
    return True


@dataclass(frozen=True)
class TableScores:
    table_id: str
    grits_con: float
    grits_loc: float
    grits_top: float
    dar_con: float
    exact_match: bool
    predicted: bool = True


def score_pair(pair: tuple[TableAnnotation, TableAnnotation | None]) -> TableScores:
    gt, pred = pair
    if pred is None:
        return TableScores(gt.table_id, 0.0, 0.0, 0.0, 0.0, False, predicted=False)
    a, b = as_grid(gt), as_grid(pred)
    return TableScores(
        gt.table_id,
        grits("con", a, b),
        grits("loc", a, b),
        grits("top", a, b),
        dar_con(a, b),
        exact_match(a, b),
    )


@dataclass
class MetricReport:
    tables: list[TableScores]

    def means(self) -> dict[str, float]:
        n = len(self.tables)
        out = {f: sum(getattr(t, f) for t in self.tables) / n for f in SCORE_FIELDS}
        out["acc_con"] = sum(t.exact_match for t in self.tables) / n
        return out

    def to_dict(self) -> dict:
        return {
            "n_tables": len(self.tables),
            "n_missing": sum(not t.predicted for t in self.tables),
            "summary": self.means(),
            "tables": [asdict(t) for t in self.tables],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["table_id", *SCORE_FIELDS, "exact_match", "predicted"])
        for t in self.tables:
            writer.writerow(
                [t.table_id, *(repr(getattr(t, f)) for f in SCORE_FIELDS), int(t.exact_match), int(t.predicted)]
            )
        return buf.getvalue()

    def to_text(self) -> str:
        m = self.means()
        header = ["Tables", "GriTS_Con", "GriTS_Loc", "GriTS_Top", "DAR_C", "Acc_C"]
        values = [f"{len(self.tables):,}"] + [
            f"{m[k]:.4f}" for k in ("grits_con", "grits_loc", "grits_top", "dar_con", "acc_con")
        ]
        widths = [max(len(h), len(v)) for h, v in zip(header, values)]
        lines = [
            "  ".join(h.rjust(w) for h, w in zip(header, widths)),
            "  ".join(v.rjust(w) for v, w in zip(values, widths)),
        ]
        return "\n".join(lines) + "\n"


def join_predictions(
    gt: Sequence[TableAnnotation], pred: Sequence[TableAnnotation]
) -> list[tuple[TableAnnotation, TableAnnotation | None]]:
    by_id: dict[str, TableAnnotation] = {}
    for p in pred:
        if p.table_id in by_id:
            raise DuplicatePrediction(p.table_id)
        by_id[p.table_id] = p
    gt_ids = set()
    for g in gt:
        if g.table_id in gt_ids:
            raise JoinError(f"duplicate ground-truth table id {g.table_id!r}")
        gt_ids.add(g.table_id)
    unknown = sorted(set(by_id) - gt_ids)
    if unknown:
        raise JoinError(f"{len(unknown)} prediction(s) match no ground-truth table, e.g. {unknown[0]!r}")
    return [(g, by_id.get(g.table_id)) for g in sorted(gt, key=lambda t: t.table_id)]


def evaluate_corpus(
    gt: Sequence[TableAnnotation], pred: Sequence[TableAnnotation], jobs: int = 1
) -> MetricReport:
    """Score predictions joined to ground truth on table_id; missing ones score zero."""
    if not gt:
        raise EmptyDataset("no ground-truth tables")
    pairs = join_predictions(gt, pred)
    return MetricReport(ordered_map(score_pair, pairs, jobs=jobs))
