"""Staged alignment and correction of table annotations."""

from .canonicalize import canonicalize
from .codes import STAGE_TITLES, Change, Completion, Flag, Reason, Stage, TableRemoved
from .completion import complete_rows_columns, refine_boxes
from .consistency import (
    detect_currency_column_removal,
    merge_adjacent_header_rows,
    remove_empty_rows_columns,
    strip_dot_leaders,
)
from .headers import infer_headers, infer_two_column_header, is_numeric_like
from .options import OptionsError, PipelineOptions, load_options
from .quality import quality_control
from .report import FlagRecord, PipelineReport, TableOutcome
from .runner import plan, process_table, run_pipeline

__all__ = [
    "STAGE_TITLES",
    "Change",
    "Completion",
    "Flag",
    "FlagRecord",
    "OptionsError",
    "PipelineOptions",
    "PipelineReport",
    "Reason",
    "Stage",
    "TableOutcome",
    "TableRemoved",
    "canonicalize",
    "complete_rows_columns",
    "detect_currency_column_removal",
    "infer_headers",
    "infer_two_column_header",
    "is_numeric_like",
    "load_options",
    "merge_adjacent_header_rows",
    "plan",
    "process_table",
    "quality_control",
    "refine_boxes",
    "remove_empty_rows_columns",
    "run_pipeline",
    "strip_dot_leaders",
]
