"""Per-table outcomes and the aggregated pipeline report."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from ..stats import DatasetStats, format_stats_table
from .codes import STAGE_TITLES


@dataclass(frozen=True)
class FlagRecord:
    stage: str
    code: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {"stage": self.stage, "code": self.code, "detail": self.detail}


@dataclass(frozen=True)
class TableOutcome:
    table_id: str
    status: str  # "kept" or "removed"
    reason: str | None = None
    stage: str | None = None
    detail: str = ""
    changes: tuple[str, ...] = ()
    completions: tuple[str, ...] = ()
    flags: tuple[FlagRecord, ...] = ()

    @property
    def modified(self) -> bool:
        return self.status == "kept" and bool(self.changes)

    @property
    def outcome(self) -> str:
        if self.status == "removed":
            return "removed"
        return "modified" if self.changes else "kept"

    def to_dict(self) -> dict:
        out = {"table_id": self.table_id, "outcome": self.outcome}
        if self.status == "removed":
            out.update(reason=self.reason, stage=self.stage, detail=self.detail)
        out["changes"] = list(self.changes)
        out["completions"] = list(self.completions)
        out["flags"] = [f.to_dict() for f in self.flags]
        return out


@dataclass
class PipelineReport:
    dataset: str
    mode: str
    target: str
    stages: tuple[str, ...]
    outcomes: list[TableOutcome]
    stats_before: DatasetStats | None = None
    stats_after: DatasetStats | None = None
    corrections_applied: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        # stable ordering by id, input order among duplicates
        self.outcomes = sorted(self.outcomes, key=lambda o: o.table_id)

    @property
    def input_count(self) -> int:
        return len(self.outcomes)

    @property
    def kept(self) -> int:
        return sum(o.status == "kept" for o in self.outcomes)

    @property
    def removed(self) -> int:
        return sum(o.status == "removed" for o in self.outcomes)

    @property
    def modified(self) -> int:
        return sum(o.modified for o in self.outcomes)

    @property
    def flagged(self) -> int:
        return sum(bool(o.flags) for o in self.outcomes)

    def removed_by_reason(self) -> dict[str, int]:
        return dict(sorted(Counter(o.reason for o in self.outcomes if o.status == "removed").items()))

    def modified_by_change(self) -> dict[str, int]:
        counts = Counter(c for o in self.outcomes if o.modified for c in o.changes)
        return dict(sorted(counts.items()))

    def flags_by_code(self) -> dict[str, int]:
        return dict(sorted(Counter(f.code for o in self.outcomes for f in o.flags).items()))

    def per_stage(self) -> dict[str, dict]:
        remaining = self.input_count
        out = {}
        for stage in self.stages:
            removed = Counter(o.reason for o in self.outcomes if o.status == "removed" and o.stage == stage)
            flags = Counter(f.code for o in self.outcomes for f in o.flags if f.stage == stage)
            remaining -= sum(removed.values())
            out[stage] = {
                "title": STAGE_TITLES[self.mode][stage],
                "removed": dict(sorted(removed.items())),
                "flags": dict(sorted(flags.items())),
                "remaining": remaining,
            }
        return out

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "mode": self.mode,
            "target": self.target,
            "totals": {
                "input": self.input_count,
                "kept": self.kept,
                "removed": self.removed,
                "modified": self.modified,
                "flagged": self.flagged,
                "corrections_applied": self.corrections_applied,
            },
            "removed_by_reason": self.removed_by_reason(),
            "modified_by_change": self.modified_by_change(),
            "flags_by_code": self.flags_by_code(),
            "stages": self.per_stage(),
            "stats_before": self.stats_before.to_dict() if self.stats_before else None,
            "stats_after": self.stats_after.to_dict() if self.stats_after else None,
            **self.extra,
            "tables": [o.to_dict() for o in self.outcomes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        lines = [
            f"Pipeline report: {self.dataset or '(unnamed)'} ({self.mode} mode, target {self.target})",
            "",
            f"input: {self.input_count:,}",
            f"kept: {self.kept:,}",
            f"removed: {self.removed:,}",
            f"modified: {self.modified:,}",
            f"flagged: {self.flagged:,}",
        ]
        if self.corrections_applied:
            lines.append(f"manual corrections applied: {self.corrections_applied:,}")
        if "ingest_failures" in self.extra:
            lines.append(f"unreadable at ingest: {len(self.extra['ingest_failures']):,}")

        lines += ["", "Stages:"]
        for stage, info in self.per_stage().items():
            removed = sum(info["removed"].values())
            flags = sum(info["flags"].values())
            lines.append(
                f"  {stage} {info['title']}: removed {removed:,}, flagged {flags:,}, remaining {info['remaining']:,}"
            )

        for title, counts in (
            ("Removed by reason:", self.removed_by_reason()),
            ("Modified by change:", self.modified_by_change()),
            ("Flags:", self.flags_by_code()),
        ):
            lines += ["", title]
            lines += [f"  {k}: {v:,}" for k, v in counts.items()] or ["  none"]

        named = [(n, s) for n, s in (("before", self.stats_before), ("after", self.stats_after)) if s]
        if named:
            lines += ["", "Statistics:"]
            lines += ["  " + ln for ln in format_stats_table(named).splitlines()]

        removed = [o for o in self.outcomes if o.status == "removed"]
        if removed:
            lines += ["", "Removed tables:"]
            lines += [f"  {o.table_id}  {o.stage}  {o.reason}  {o.detail}".rstrip() for o in removed]
        flagged = [o for o in self.outcomes if o.flags]
        if flagged:
            lines += ["", "Flagged for review:"]
            for o in flagged:
                for f in o.flags:
                    lines.append(f"  {o.table_id}  {f.stage}  {f.code}  {f.detail}".rstrip())
        return "\n".join(lines) + "\n"
