"""Friedman rank aggregation of algorithm results over a set of test functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .exceptions import IncompleteDataError

MAXIMIZE = "maximize"
MINIMIZE = "minimize"

# Which way is better for each quality indicator.
METRIC_DIRECTIONS = {
    "hypervolume": MAXIMIZE,
    "gd": MINIMIZE,
    "igd": MINIMIZE,
    "spread": MINIMIZE,
}


@dataclass(frozen=True)
class RankTable:
    algorithms: tuple[str, ...]
    functions: tuple[str, ...]
    values: np.ndarray
    direction: str
    ranks: np.ndarray
    mean_ranks: np.ndarray
    global_ranks: np.ndarray

    def friedman_statistic(self) -> tuple[float, float]:
        """Friedman chi-square statistic and its p-value."""
        from scipy.stats import chi2

        k = len(self.algorithms)
        n = len(self.functions)
        stat = 12.0 * n / (k * (k + 1)) * (np.sum(self.mean_ranks**2) - k * (k + 1) ** 2 / 4.0)
        return float(stat), float(chi2.sf(stat, k - 1))


def _check_direction(direction):
    if direction not in (MAXIMIZE, MINIMIZE):
        raise ValueError(f"direction must be {MAXIMIZE!r} or {MINIMIZE!r}, got {direction!r}")


def global_ranks(mean_ranks) -> np.ndarray:
    """Rank mean ranks; equal means share the smaller position (1, 1, 3, ...)."""
    from scipy.stats import rankdata

    # Round away summation noise so that mathematically equal means tie.
    means = np.round(np.asarray(mean_ranks, dtype=float), 12)
    return rankdata(means, method="min").astype(int)


def friedman_ranks(
    values,
    direction: str = MINIMIZE,
    algorithms: Sequence[str] | None = None,
    functions: Sequence[str] | None = None,
) -> RankTable:
    """Rank algorithms per function and average the ranks.

    ``values`` is an (algorithms x functions) matrix, or a mapping from
    algorithm name to its per-function values. Rank 1 is best under
    ``direction``; tied values get the average of the ranks they span.
    """
    from scipy.stats import rankdata

    _check_direction(direction)
    if isinstance(values, Mapping):
        algorithms = tuple(values) if algorithms is None else algorithms
        values = [values[a] for a in algorithms]
    try:
        mat = np.array(values, dtype=float)
    except ValueError as exc:
        raise IncompleteDataError(f"ragged value matrix: {exc}") from None
    if mat.ndim != 2 or mat.size == 0:
        raise IncompleteDataError(f"expected a nonempty 2-D matrix, got shape {mat.shape}")
    if np.isnan(mat).any():
        rows, cols = np.nonzero(np.isnan(mat))
        raise IncompleteDataError(
            f"missing values at (algorithm, function) cells {list(zip(rows.tolist(), cols.tolist()))}"
        )
    n_alg, n_fun = mat.shape
    algorithms = tuple(algorithms) if algorithms is not None else tuple(f"A{i}" for i in range(n_alg))
    functions = tuple(functions) if functions is not None else tuple(f"F{j}" for j in range(n_fun))
    if len(algorithms) != n_alg or len(functions) != n_fun:
        raise IncompleteDataError("name lists do not match the matrix shape")

    keyed = -mat if direction == MAXIMIZE else mat
    ranks = rankdata(keyed, method="average", axis=0)
    mean_ranks = ranks.mean(axis=1)
    return RankTable(
        algorithms=algorithms,
        functions=functions,
        values=mat,
        direction=direction,
        ranks=ranks,
        mean_ranks=mean_ranks,
        global_ranks=global_ranks(mean_ranks),
    )


def format_cell(mean_rank: float, global_rank: int) -> str:
    return f"{mean_rank:.3f} ({int(global_rank)})"


def report(table: RankTable) -> list[str]:
    """One ``"name mean (rank)"`` line per algorithm, in input order."""
    return [
        f"{name} {format_cell(mean, rank)}"
        for name, mean, rank in zip(table.algorithms, table.mean_ranks, table.global_ranks)
    ]


def metric_tables(results: Mapping[str, Mapping[str, Mapping[str, float]]]) -> dict[str, RankTable]:
    """Build one rank table per metric from per-algorithm metric matrices.

    ``results[algorithm][problem][metric]`` holds a value. Only problems
    present for every algorithm are compared; a metric missing for any
    (algorithm, problem) pair raises :class:`IncompleteDataError`.
    """
    algorithms = tuple(results)
    problems = [p for p in next(iter(results.values())) if all(p in results[a] for a in algorithms)]
    if not problems:
        raise IncompleteDataError("the algorithms share no problems")
    tables = {}
    for metric, direction in METRIC_DIRECTIONS.items():
        try:
            mat = [[results[a][p][metric] for p in problems] for a in algorithms]
        except KeyError as exc:
            raise IncompleteDataError(f"metric {exc} missing from an input matrix") from None
        tables[metric] = friedman_ranks(mat, direction, algorithms, problems)
    return tables


def format_metric_tables(tables: Mapping[str, RankTable]) -> list[list[str]]:
    """Rows of a metrics x algorithms table with ``"mean (rank)"`` cells."""
    algorithms = next(iter(tables.values())).algorithms
    rows = [["metric", *algorithms]]
    for metric, table in tables.items():
        rows.append([metric, *(format_cell(m, r) for m, r in zip(table.mean_ranks, table.global_ranks))])
    return rows


def align(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)
