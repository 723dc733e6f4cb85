"""Exception types shared across the package."""

from __future__ import annotations


class TabAlignError(Exception):
    """Base class for all errors raised by tabalign."""


class TableError(TabAlignError, ValueError):
    """A table annotation violates a structural invariant."""


class OutOfRange(TableError):
    def __init__(self, cell_index: int, message: str = ""):
        self.cell_index = cell_index
        super().__init__(message or f"cell {cell_index} extends outside the table grid")


class OverlappingCells(TableError):
    def __init__(self, cells: tuple[int, int], position: tuple[int, int]):
        self.cells = cells
        self.position = position
        super().__init__(
            f"cells {cells[0]} and {cells[1]} both cover grid position {position}"
        )


class ValidationFailure(TableError):
    """Raised when an annotation fails validation; `path` names the offending field."""

    def __init__(self, table_id: str, path: str, message: str):
        self.table_id = table_id
        self.path = path
        super().__init__(f"{table_id}: {path}: {message}")


class EmptyGrid(TableError):
    pass


class TooLarge(TabAlignError, ValueError):
    pass


# ingestion


class IngestError(TabAlignError):
    """A single source record could not be turned into a table."""

    reason = "Unreadable"


class MalformedXml(IngestError):
    reason = "MalformedXml"


class MissingIndex(IngestError):
    reason = "MissingIndex"


class TokenStreamInvalid(IngestError):
    reason = "TokenStreamInvalid"


class BoxCountMismatch(IngestError):
    reason = "BoxCountMismatch"


class SchemaVersionMismatch(TabAlignError):
    pass


class ManifestError(TabAlignError):
    pass


class CorrectionError(TabAlignError):
    pass


class TargetNotFound(CorrectionError):
    pass


class ResultInvalid(CorrectionError):
    pass


# evaluation


class JoinError(TabAlignError):
    pass


class DuplicatePrediction(JoinError):
    def __init__(self, table_id: str):
        self.table_id = table_id
        super().__init__(f"more than one prediction for table {table_id!r}")


class EmptyDataset(TabAlignError):
    pass


# rendering


class UnknownTable(TabAlignError):
    pass


class UnknownLayer(TabAlignError):
    pass
