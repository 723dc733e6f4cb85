"""Table similarity metrics: GriTS, content DAR and exact match."""

from .dar import adjacency_relations, dar_con
from .evaluate import MetricReport, TableScores, evaluate_corpus, exact_match, join_predictions
from .grits import grits, grits_exact
from .similarity import (
    CellSimilarityKind,
    content_similarity,
    entry_similarity,
    lcs_length,
    location_similarity,
    normalize_text,
    topology_similarity,
)

__all__ = [
    "CellSimilarityKind",
    "MetricReport",
    "TableScores",
    "adjacency_relations",
    "content_similarity",
    "dar_con",
    "entry_similarity",
    "evaluate_corpus",
    "exact_match",
    "grits",
    "grits_exact",
    "join_predictions",
    "lcs_length",
    "location_similarity",
    "normalize_text",
    "topology_similarity",
]
