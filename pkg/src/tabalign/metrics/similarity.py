"""Per-entry similarities used by the grid metrics."""

from __future__ import annotations

import enum

from ..geometry import BBox
from ..grid import GridEntry


class CellSimilarityKind(str, enum.Enum):
    Content = "con"
    Location = "loc"
    Topology = "top"


def normalize_text(text: str) -> str:
    return " ".join(text.split())


def lcs_length(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for ch in a:
        cur = [0]
        for j, other in enumerate(b):
            cur.append(prev[j] + 1 if ch == other else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def content_similarity(a: str, b: str) -> float:
    a, b = normalize_text(a), normalize_text(b)
    if not a and not b:
        return 1.0
    return 2 * lcs_length(a, b) / (len(a) + len(b))


def location_similarity(a: BBox | None, b: BBox | None) -> float:
    if a is None and b is None:
        return 1.0
    if a is None or b is None:
        return 0.0
    return a.iou(b)


def topology_similarity(a: tuple[int, int, int, int], b: tuple[int, int, int, int]) -> float:
    """IoU of the span rectangles, both expressed relative to the grid position."""

    def rect(e):
        return (e[0], e[1] + 1, e[2], e[3] + 1)

    (r0, r1, c0, c1), (s0, s1, d0, d1) = rect(a), rect(b)
    inter = max(0, min(r1, s1) - max(r0, s0)) * max(0, min(c1, d1) - max(c0, d0))
    union = (r1 - r0) * (c1 - c0) + (s1 - s0) * (d1 - d0) - inter
    return inter / union


def entry_similarity(kind: CellSimilarityKind | str, a: GridEntry, b: GridEntry) -> float:
    kind = CellSimilarityKind(kind)
    if kind is CellSimilarityKind.Content:
        return content_similarity(a.text, b.text)
    if kind is CellSimilarityKind.Location:
        return location_similarity(a.box, b.box)
    return topology_similarity(a.rel_extent, b.rel_extent)
