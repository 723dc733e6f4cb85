"""Grid table similarity: a factored alternating-alignment heuristic and an exhaustive oracle."""

from __future__ import annotations

from itertools import combinations

from ..errors import EmptyGrid, TooLarge
from ..grid import TableGrid, build_grid
from ..model import TableAnnotation
from .similarity import CellSimilarityKind, entry_similarity

MAX_ROUNDS = 20
EXACT_LIMIT = 4

Pairs = list[tuple[int, int]]


def as_grid(x: TableGrid | TableAnnotation) -> TableGrid:
    grid = build_grid(x) if isinstance(x, TableAnnotation) else x
    if grid.n_rows == 0 or grid.n_cols == 0:
        raise EmptyGrid("grid has no positions")
    return grid


def similarity_tensor(kind, gt: TableGrid, pred: TableGrid) -> list[list[list[list[float]]]]:
    """sim[i][j][k][l] between gt (i, j) and pred (k, l)."""
    cache: dict = {}

    def f(a, b):
        key = (a, b)
        if key not in cache:
            cache[key] = entry_similarity(kind, a, b)
        return cache[key]

    return [
        [[[f(gt.entries[i][j], pred.entries[k][l]) for l in range(pred.n_cols)] for k in range(pred.n_rows)]
         for j in range(gt.n_cols)]
        for i in range(gt.n_rows)
    ]


def align(weights: list[list[float]]) -> tuple[float, Pairs]:
    """Best monotone matching of two sequences under pairwise non-negative weights."""
    n = len(weights)
    m = len(weights[0]) if n else 0
    dp = [[0.0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        row, above = dp[i], dp[i - 1]
        for k in range(1, m + 1):
            row[k] = max(above[k], row[k - 1], above[k - 1] + weights[i - 1][k - 1])
    pairs: Pairs = []
    i, k = n, m
    while i and k:
        if dp[i][k] == dp[i - 1][k - 1] + weights[i - 1][k - 1] and weights[i - 1][k - 1] > 0:
            pairs.append((i - 1, k - 1))
            i, k = i - 1, k - 1
        elif dp[i][k] == dp[i - 1][k]:
            i -= 1
        else:
            k -= 1
    pairs.reverse()
    return dp[n][m], pairs


def _row_weights(sim, rows: tuple[int, int], cols: Pairs, transpose: bool) -> list[list[float]]:
    n_a, n_b = rows
    if transpose:
        return [[sum(sim[i][j][k][l] for i, k in cols) for l in range(n_b)] for j in range(n_a)]
    return [[sum(sim[i][j][k][l] for j, l in cols) for k in range(n_b)] for i in range(n_a)]


def _score(gt: TableGrid, pred: TableGrid, total: float) -> float:
    return 2 * total / (gt.size + pred.size)


def _alternate(sim, gt: TableGrid, pred: TableGrid, cols: Pairs) -> float:
    best = 0.0
    state = None
    for _ in range(MAX_ROUNDS):
        _, rows = align(_row_weights(sim, (gt.n_rows, pred.n_rows), cols, False))
        total, cols = align(_row_weights(sim, (gt.n_cols, pred.n_cols), rows, True))
        best = max(best, total)
        if (rows, cols) == state:
            break
        state = (rows, cols)
    return best


def _profile_start(sim, gt: TableGrid, pred: TableGrid) -> Pairs:
    """Column pairs implied by aligning rows on their best one-dimensional column matches."""
    weights = [
        [align([[sim[i][j][k][l] for l in range(pred.n_cols)] for j in range(gt.n_cols)])[0] for k in range(pred.n_rows)]
        for i in range(gt.n_rows)
    ]
    _, rows = align(weights)
    return align(_row_weights(sim, (gt.n_cols, pred.n_cols), rows, True))[1]


def _grits_once(sim, gt: TableGrid, pred: TableGrid) -> float:
    n = min(gt.n_cols, pred.n_cols)
    starts = [
        [(j, j) for j in range(n)],
        [(gt.n_cols - n + j, pred.n_cols - n + j) for j in range(n)],
        _profile_start(sim, gt, pred),
    ]
    return max(_alternate(sim, gt, pred, cols) for cols in starts)


def _transpose(sim, gt: TableGrid, pred: TableGrid):
    return [
        [[[sim[i][j][k][l] for k in range(pred.n_rows)] for l in range(pred.n_cols)] for i in range(gt.n_rows)]
        for j in range(gt.n_cols)
    ]


def _swap(sim, gt: TableGrid, pred: TableGrid):
    return [
        [[[sim[i][j][k][l] for j in range(gt.n_cols)] for i in range(gt.n_rows)] for l in range(pred.n_cols)]
        for k in range(pred.n_rows)
    ]


def _t(grid: TableGrid) -> TableGrid:
    return TableGrid(grid.n_cols, grid.n_rows, tuple(zip(*grid.entries)))


def grits(kind: CellSimilarityKind | str, gt, pred) -> float:
    """Heuristic GriTS in [0, 1]; never above :func:`grits_exact`.

    Alternates row and column alignment, starting from the identity prefix
    correspondence plus a few cheap extra starts; every start is run in
    both argument orders, so the score is symmetric.
    """
    kind = CellSimilarityKind(kind)
    gt, pred = as_grid(gt), as_grid(pred)
    sim = similarity_tensor(kind, gt, pred)
    best = max(
        _grits_once(sim, gt, pred),
        _grits_once(_swap(sim, gt, pred), pred, gt),
        _grits_once(_transpose(sim, gt, pred), _t(gt), _t(pred)),
    )
    return min(1.0, _score(gt, pred, best))


def _subsequence_pairs(n: int, m: int):
    for size in range(1, min(n, m) + 1):
        for a in combinations(range(n), size):
            for b in combinations(range(m), size):
                yield a, b


def grits_exact(kind: CellSimilarityKind | str, gt, pred) -> float:
    """Exhaustive optimum over all row and column subsequence pairs (grids up to 4x4)."""
    kind = CellSimilarityKind(kind)
    gt, pred = as_grid(gt), as_grid(pred)
    if max(gt.n_rows, gt.n_cols, pred.n_rows, pred.n_cols) > EXACT_LIMIT:
        raise TooLarge(f"exact search is limited to {EXACT_LIMIT}x{EXACT_LIMIT} grids")
    sim = similarity_tensor(kind, gt, pred)
    col_pairs = list(_subsequence_pairs(gt.n_cols, pred.n_cols))
    best = 0.0
    for rows_a, rows_b in _subsequence_pairs(gt.n_rows, pred.n_rows):
        for cols_a, cols_b in col_pairs:
            total = sum(
                sim[i][j][k][l] for i, k in zip(rows_a, rows_b) for j, l in zip(cols_a, cols_b)
            )
            best = max(best, total)
    return min(1.0, _score(gt, pred, best))
