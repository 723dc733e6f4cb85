"""Stage planning and the per-table pipeline driver."""

from __future__ import annotations

from dataclasses import dataclass
from functools import partial
from typing import Callable, Sequence

from ..errors import EmptyDataset
from ..ingest.corrections import ManualCorrection, apply_corrections
from ..model import TableAnnotation, validate
from ..parallel import ordered_map
from ..stats import dataset_stats
from .canonicalize import canonicalize
from .codes import Change, Completion, Flag, Stage, TableRemoved
from .completion import complete_rows_columns, refine_boxes
from .consistency import (
    detect_currency_column_removal,
    merge_adjacent_header_rows,
    remove_empty_rows_columns,
    strip_dot_leaders,
)
from .headers import infer_headers, infer_two_column_header
from .options import OptionsError, PipelineOptions
from .quality import quality_control
from .report import FlagRecord, PipelineReport, TableOutcome

MODES = ("fintabnet", "icdar")

Transform = Callable[[TableAnnotation, PipelineOptions], TableAnnotation]


@dataclass(frozen=True)
class Step:
    stage: str  # label used in the report
    name: str
    fn: Transform
    retile: bool = False  # only runs when the stage changed the grid shape


def _steps_a3(stage: str) -> list[Step]:
    return [
        Step(stage, "strip_dot_leaders", strip_dot_leaders),
        Step(stage, "remove_empty_rows_columns", remove_empty_rows_columns),
        Step(stage, "merge_adjacent_header_rows", merge_adjacent_header_rows),
        Step(stage, "detect_currency_column_removal", detect_currency_column_removal),
        Step(stage, "refine_boxes", refine_boxes, retile=True),
    ]


def plan(target: Stage, mode: str = "fintabnet") -> list[Step]:
    """Steps executed for an ablation at ``target``, in execution order."""
    if mode not in MODES:
        raise OptionsError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    if mode == "icdar":
        if target > Stage.A3_Consistency:
            raise OptionsError("icdar mode has stages a1..a3 only")
        steps = [Step("a1", "complete_rows_columns", complete_rows_columns)]
        if target >= Stage.A3_Consistency:
            steps += [Step("a3", "refine_boxes", refine_boxes)]
            steps += _steps_a3("a3")
            steps += [
                Step("a3", "infer_two_column_header", infer_two_column_header),
                Step("a3", "infer_headers", infer_headers),
                Step("a3", "canonicalize", canonicalize),
            ]
        return steps

    steps = [Step("a1", "complete_rows_columns", complete_rows_columns)]
    if target >= Stage.A2_BoxAdjust:
        steps.append(Step("a2", "refine_boxes", refine_boxes))
    if target >= Stage.A3_Consistency:
        steps += _steps_a3("a3")
    if target >= Stage.A5_TwoColHeader:
        steps.append(Step("a5", "infer_two_column_header", infer_two_column_header))
    if target >= Stage.A4_Canonicalize:
        steps += [Step("a4", "infer_headers", infer_headers), Step("a4", "canonicalize", canonicalize)]
    if target >= Stage.A6_QualityControl:
        steps.append(Step("a6", "quality_control", quality_control))
    return steps


def stage_labels(target: Stage, mode: str) -> tuple[str, ...]:
    """Stage labels in execution order (a5 precedes a4)."""
    labels = list(dict.fromkeys(step.stage for step in plan(target, mode)))
    if mode == "icdar" and target >= Stage.A2_BoxAdjust:
        labels.insert(1, "a2")
    return tuple(labels)


def _diff(before: TableAnnotation, after: TableAnnotation) -> set[str]:
    if before is after:
        return set()
    kinds = set()
    if before.n_rows != after.n_rows:
        kinds.add("rows_count")
    if before.n_cols != after.n_cols:
        kinds.add("cols_count")
    if [c.extent for c in before.cells] != [c.extent for c in after.cells]:
        kinds.add("extents")
    if [c.text for c in before.cells] != [c.text for c in after.cells]:
        kinds.add("text")
    if [c.box for c in before.cells] != [c.box for c in after.cells]:
        kinds.add("cell_boxes")
    if [r.box for r in before.rows] != [r.box for r in after.rows] or before.columns != after.columns:
        kinds.add("layout")
    labels = lambda t: (  # noqa: E731
        [(c.is_column_header, c.is_projected_row_header) for c in t.cells],
        [r.is_column_header for r in t.rows],
    )
    if labels(before) != labels(after):
        kinds.add("labels")
    if before.words != after.words:
        kinds.add("words")
    return kinds


# step name -> diff kind -> code; "*" matches any difference
_CODES: dict[str, dict[str, Change | Completion]] = {
    "complete_rows_columns": {"layout": Completion.RowColumnBoxesCreated},
    "refine_boxes": {"cell_boxes": Change.CellBoxesAdjusted, "layout": Completion.BoxesRefined},
    "strip_dot_leaders": {"*": Change.DotLeadersStripped},
    "remove_empty_rows_columns": {"rows_count": Change.EmptyRowsRemoved, "cols_count": Change.EmptyColumnsRemoved},
    "merge_adjacent_header_rows": {"*": Change.HeaderRowsMerged},
    "infer_two_column_header": {"*": Completion.TwoColumnHeaderInferred},
    "infer_headers": {"extents": Change.Canonicalized, "labels": Completion.HeadersInferred},
    "canonicalize": {"*": Change.Canonicalized},
}


def _codes(step: Step, kinds: set[str]) -> list[Change | Completion]:
    rules = _CODES.get(step.name, {})
    out = []
    for kind, code in rules.items():
        if (kind == "*" and kinds) or kind in kinds:
            if code not in out:
                out.append(code)
    return out


def process_table(
    table: TableAnnotation, steps: Sequence[Step], options: PipelineOptions, mode: str, stage_tag: str
) -> tuple[TableAnnotation | None, TableOutcome]:
    """Run the planned steps on one table.

    In icdar mode a step that would remove the table is recorded as a flag
    and the table carries on unchanged from before that step.
    """
    changes: list[str] = []
    completions: list[str] = []
    flags: list[FlagRecord] = []
    shape_at_stage: dict[str, tuple[int, int]] = {}

    for step in steps:
        shape_at_stage.setdefault(step.stage, (table.n_rows, table.n_cols))
        if step.retile and shape_at_stage[step.stage] == (table.n_rows, table.n_cols):
            continue
        try:
            new = step.fn(table, options)
        except TableRemoved as exc:
            if mode == "icdar":
                flags.append(FlagRecord(step.stage, exc.reason.value, f"{step.name}: {exc.detail}"))
                continue
            return None, TableOutcome(
                table.table_id,
                "removed",
                exc.reason.value,
                step.stage,
                exc.detail,
                tuple(changes),
                tuple(completions),
                tuple(flags),
            )
        validate(new)
        for code in _codes(step, _diff(table, new)):
            bucket = changes if isinstance(code, Change) else completions
            if code.value not in bucket:
                bucket.append(code.value)
        table = new
        if step.name == "infer_headers" and table.n_cols > 2 and not table.header_rows:
            flags.append(FlagRecord(step.stage, Flag.HeaderUndetermined.value, "no complete row in the top half"))

    table = table.with_(stage=stage_tag)
    return table, TableOutcome(
        table.table_id, "kept", changes=tuple(changes), completions=tuple(completions), flags=tuple(flags)
    )


def _stats(tables):
    try:
        return dataset_stats(tables)
    except EmptyDataset:
        return None


def run_pipeline(
    tables: Sequence[TableAnnotation],
    target: Stage | str,
    options: PipelineOptions | None = None,
    *,
    mode: str = "fintabnet",
    corrections: Sequence[ManualCorrection] = (),
    dataset: str = "",
    jobs: int = 1,
) -> tuple[list[TableAnnotation], PipelineReport]:
    """Produce the ablation at ``target`` and its report.

    Manual corrections are applied up front: always in fintabnet mode, and
    from a2 onwards in icdar mode where they form that stage.
    """
    target = Stage.parse(target) if isinstance(target, str) else Stage(target)
    options = options or PipelineOptions()
    steps = plan(target, mode)

    applied = 0
    if corrections and (mode == "fintabnet" or target >= Stage.A2_BoxAdjust):
        tables = apply_corrections(tables, corrections)
        applied = len(corrections)
    tables = list(tables)

    worker = partial(process_table, steps=steps, options=options, mode=mode, stage_tag=target.label)
    results = ordered_map(worker, tables, jobs=jobs)
    kept = [t for t, _ in results if t is not None]
    report = PipelineReport(
        dataset=dataset,
        mode=mode,
        target=target.label,
        stages=stage_labels(target, mode),
        outcomes=[o for _, o in results],
        stats_before=_stats(tables),
        stats_after=_stats(kept),
        corrections_applied=applied,
    )
    return kept, report
