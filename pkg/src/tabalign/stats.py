"""Dataset diversity and complexity statistics."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable

from .errors import EmptyDataset
from .grid import topology_signature
from .model import TableAnnotation

COLUMNS = (
    "Dataset",
    "# Tables",
    "# Unique Topologies",
    "Avg. Tables / Topology",
    "Avg. Rows / Table",
    "Avg. Cols. / Table",
    "Avg. Spanning Cells / Table",
)


@dataclass(frozen=True)
class DatasetStats:
    n_tables: int
    n_unique_topologies: int
    avg_tables_per_topology: float
    avg_rows: float
    avg_cols: float
    avg_spanning_cells: float

    def to_dict(self) -> dict:
        return asdict(self)

    def text_row(self, name: str) -> list[str]:
        return [
            name,
            f"{self.n_tables:,}",
            f"{self.n_unique_topologies:,}",
            f"{self.avg_tables_per_topology:.2f}",
            f"{self.avg_rows:.2f}",
            f"{self.avg_cols:.2f}",
            f"{self.avg_spanning_cells:.2f}",
        ]


def spanning_cell_count(table: TableAnnotation) -> int:
    """Non-blank cells covering more than one grid position."""
    return sum(1 for c in table.cells if c.is_spanning and not c.is_blank)


def dataset_stats(tables: Iterable[TableAnnotation]) -> DatasetStats:
    n = rows = cols = spans = 0
    topologies = set()
    for table in tables:
        n += 1
        rows += table.n_rows
        cols += table.n_cols
        spans += spanning_cell_count(table)
        topologies.add(topology_signature(table))
    if n == 0:
        raise EmptyDataset("no tables to summarize")
    return DatasetStats(
        n_tables=n,
        n_unique_topologies=len(topologies),
        avg_tables_per_topology=n / len(topologies),
        avg_rows=rows / n,
        avg_cols=cols / n,
        avg_spanning_cells=spans / n,
    )


def format_stats_table(named: Iterable[tuple[str, DatasetStats]]) -> str:
    """Aligned text table, averages to two decimals."""
    body = [list(COLUMNS)] + [s.text_row(name) for name, s in named]
    widths = [max(len(row[k]) for row in body) for k in range(len(COLUMNS))]
    lines = []
    for i, row in enumerate(body):
        cells = [row[0].ljust(widths[0])] + [v.rjust(w) for v, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
