"""Table structure annotation toolkit: ingestion, staged alignment, metrics and statistics."""

from .errors import TabAlignError
from .geometry import BBox
from .grid import GridEntry, TableGrid, build_grid, topology_signature
from .model import Cell, Column, Provenance, Row, TableAnnotation, Word, validate
from .stats import DatasetStats, dataset_stats

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "Cell",
    "Column",
    "DatasetStats",
    "GridEntry",
    "Provenance",
    "Row",
    "TabAlignError",
    "TableAnnotation",
    "TableGrid",
    "Word",
    "build_grid",
    "dataset_stats",
    "topology_signature",
    "validate",
]
