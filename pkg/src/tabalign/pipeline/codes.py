"""Closed sets of stage ids, removal reasons and change codes."""

from __future__ import annotations

import enum

from ..errors import TabAlignError


class Stage(enum.IntEnum):
    A1_Completion = 1
    A2_BoxAdjust = 2
    A3_Consistency = 3
    A4_Canonicalize = 4
    A5_TwoColHeader = 5
    A6_QualityControl = 6

    @property
    def label(self) -> str:
        return f"a{self.value}"

    @classmethod
    def parse(cls, text: str) -> Stage:
        key = text.strip().lower()
        for stage in cls:
            if key in (stage.label, stage.name.lower()):
                return stage
        raise ValueError(f"unknown stage {text!r}; expected a1..a6")


STAGE_TITLES = {
    "fintabnet": {
        "a1": "Completion",
        "a2": "Cell box adjustment",
        "a3": "Consistency adjustments",
        "a4": "Canonicalization",
        "a5": "Additional column header inference",
        "a6": "Quality control",
    },
    "icdar": {
        "a1": "Completion",
        "a2": "Manual correction",
        "a3": "Consistency adjustments and canonicalization",
    },
}


class Reason(str, enum.Enum):
    UndefinedExtent = "UndefinedExtent"
    InvertedOrder = "InvertedOrder"
    AmbiguousWord = "AmbiguousWord"
    NoConvergence = "NoConvergence"
    LeaderAmbiguity = "LeaderAmbiguity"
    AllEmpty = "AllEmpty"
    CurrencySplitColumn = "CurrencySplitColumn"
    TwoColumnAmbiguous = "TwoColumnAmbiguous"
    CanonicalizationConflict = "CanonicalizationConflict"
    WordCellCoincidence = "WordCellCoincidence"
    CaptionAsRow = "CaptionAsRow"
    FooterAsRow = "FooterAsRow"
    HeaderOnly = "HeaderOnly"


class Change(str, enum.Enum):
    # corrective edits; a kept table carrying any of these counts as modified
    CellBoxesAdjusted = "CellBoxesAdjusted"
    DotLeadersStripped = "DotLeadersStripped"
    EmptyRowsRemoved = "EmptyRowsRemoved"
    EmptyColumnsRemoved = "EmptyColumnsRemoved"
    HeaderRowsMerged = "HeaderRowsMerged"
    Canonicalized = "Canonicalized"


class Completion(str, enum.Enum):
    # labels made explicit; these do not count as modifications
    RowColumnBoxesCreated = "RowColumnBoxesCreated"
    BoxesRefined = "BoxesRefined"
    HeadersInferred = "HeadersInferred"
    TwoColumnHeaderInferred = "TwoColumnHeaderInferred"


class Flag(str, enum.Enum):
    HeaderUndetermined = "HeaderUndetermined"


class TableRemoved(TabAlignError):
    """Raised by a stage transform when the table must leave the dataset."""

    def __init__(self, reason: Reason, detail: str = ""):
        self.reason = Reason(reason)
        self.detail = detail
        super().__init__(f"{self.reason.value}: {detail}" if detail else self.reason.value)
