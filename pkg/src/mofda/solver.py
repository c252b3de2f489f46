"""Deterministic single-objective fractal decomposition search.

The search walks a tree of hyperspheres depth first. Each expanded sphere is
split into ``2 * D`` children which are scored and then visited best first.
Spheres at ``depth_k`` are not split further; instead an intensification
local search (ILS) runs from their centre. Once every leaf under a parent has
been exploited the walk backtracks to the next-best sibling one level up.
The run ends when the evaluation budget is spent or the whole tree has been
visited.

Objectives receive the decision vector as a ``list`` of floats in problem
coordinates and must return a float.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Sequence

import numpy as np

from .geometry import (
    DEFAULT_INFLATION,
    BoxBounds,
    Hypersphere,
    _to_problem_list,
    _widths,
    decompose,
    unit_root,
)

Objective = Callable[[list], float]


@dataclass(frozen=True)
class SolverConfig:
    depth_k: int = 5
    eval_budget: int = 100_000
    ils_initial_step_ratio: float = 1.0
    ils_step_shrink: float = 0.5
    ils_min_step: float = 1e-5
    inflation: float = DEFAULT_INFLATION
    quality_probe_ratio: float = 0.5
    record_trace: bool = False

    def __post_init__(self):
        if self.depth_k < 1:
            raise ValueError(f"depth_k must be >= 1, got {self.depth_k}")
        if self.eval_budget < 1:
            raise ValueError(f"eval_budget must be >= 1, got {self.eval_budget}")
        if not 0 < self.ils_initial_step_ratio <= 1:
            raise ValueError("ils_initial_step_ratio must lie in (0, 1]")
        if not 0 < self.ils_step_shrink < 1:
            raise ValueError("ils_step_shrink must lie in (0, 1)")
        if not self.ils_min_step > 0:
            raise ValueError("ils_min_step must be positive")
        if not self.inflation > 0:
            raise ValueError("inflation must be positive")
        if not self.quality_probe_ratio >= 0:
            raise ValueError("quality_probe_ratio must be non-negative")

    def check_dimension(self, dim: int):
        if self.eval_budget < 2 * dim * self.depth_k:
            raise ValueError(
                f"eval_budget {self.eval_budget} is below 2*D*depth_k = "
                f"{2 * dim * self.depth_k}; not enough for a single descent"
            )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SolverConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown solver config fields: {sorted(unknown)}")
        return cls(**data)


@dataclass
class SolverResult:
    best_point: np.ndarray
    best_value: float
    evals_used: int
    trace: list[tuple[int, float]] | None = field(default=None)


class BudgetExhausted(Exception):
    """Raised when an evaluation is requested after the budget is spent.

    Carries the best point and value seen so far (``None`` / ``inf`` if no
    evaluation happened at all).
    """

    def __init__(self, best_point, best_value, evals_used):
        super().__init__(f"evaluation budget exhausted after {evals_used} evaluations")
        self.best_point = best_point
        self.best_value = best_value
        self.evals_used = evals_used


class BudgetedObjective:
    """Wraps an objective with unit-box mapping, a budget and best tracking.

    Call it with a point in unit-box coordinates. Every call counts against
    the budget; once the budget is spent the next call raises
    :class:`BudgetExhausted` without evaluating.
    """

    def __init__(self, objective: Objective, bounds: BoxBounds, budget: int, record_trace=False):
        self.objective = objective
        self.bounds = bounds
        self.budget = int(budget)
        self.used = 0
        self.best_value = math.inf
        self.best_point: list[float] | None = None
        self.trace: list[tuple[int, float]] | None = [] if record_trace else None
        self._lower = bounds.lower
        self._upper = bounds.upper
        self._widths = _widths(bounds)

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    def __call__(self, x_unit: Sequence[float]) -> float:
        if self.used >= self.budget:
            raise self.exhausted()
        y = _to_problem_list(x_unit, self._lower, self._upper, self._widths)
        value = float(self.objective(y))
        self.used += 1
        # Ties go to the newest point: on flat objectives (a zero weight) the
        # local search keeps improving the ignored objectives at equal value.
        if value <= self.best_value:
            if self.trace is not None and value < self.best_value:
                self.trace.append((self.used, value))
            self.best_value = value
            self.best_point = y
        return value

    def exhausted(self) -> BudgetExhausted:
        return BudgetExhausted(self.best_point, self.best_value, self.used)

    def result(self) -> SolverResult:
        point = np.array(self.best_point) if self.best_point is not None else None
        return SolverResult(point, self.best_value, self.used, self.trace)


def _as_budgeted(objective, bounds, budget) -> BudgetedObjective:
    if isinstance(objective, BudgetedObjective):
        return objective
    if bounds is None:
        raise ValueError("bounds are required when objective is a plain callable")
    return BudgetedObjective(objective, bounds, budget)


def score_sphere(
    sphere: Hypersphere,
    objective: Objective | BudgetedObjective,
    bounds: BoxBounds | None = None,
    probe_ratio: float = 0.5,
) -> float:
    """Score ``sphere`` by the best of three probes and store it as its quality.

    The probes are the centre and the centre shifted by
    ``+/- probe_ratio * radius`` along the main diagonal direction
    ``(1, ..., 1) / sqrt(D)``. All three count against the budget.
    """
    objective = _as_budgeted(objective, bounds, 3)
    offset = probe_ratio * sphere.radius / math.sqrt(sphere.dim)
    center = sphere.center
    quality = objective(center)
    quality = min(quality, objective([c + offset for c in center]))
    quality = min(quality, objective([c - offset for c in center]))
    sphere.quality = quality
    return quality


def _ils(objective: BudgetedObjective, start, step0, shrink, min_step_ratio):
    x = list(start)
    fx = objective(x)
    step = step0
    stop = min_step_ratio * step0
    dim = len(x)
    while step >= stop:
        improved = False
        for d in range(dim):
            xd = x[d]
            best_c, best_v = xd, fx
            for c in (xd - step, xd + step):
                c = 0.0 if c < 0.0 else 1.0 if c > 1.0 else c
                if c == xd:
                    continue
                x[d] = c
                v = objective(x)
                # Equal-valued moves are taken so that the search can slide
                # along the flat ridges of max-type objectives.
                if v < best_v or (v == best_v and best_c == xd):
                    best_c, best_v = c, v
            x[d] = best_c
            if best_v < fx:
                improved = True
            fx = best_v
        if not improved:
            step *= shrink
    return x, fx


def ils(
    start: Sequence[float],
    step0: float,
    objective: Objective | BudgetedObjective,
    bounds: BoxBounds | None = None,
    budget_remaining: int | None = None,
    cfg: SolverConfig = SolverConfig(),
) -> SolverResult:
    """Intensification local search from ``start`` (unit-box coordinates).

    Sweeps the coordinates in order; for each one the current point and the
    two points one step away are compared and the best is kept. A sweep with
    no strict improvement multiplies the step by ``cfg.ils_step_shrink``. The
    search stops once the step drops below ``cfg.ils_min_step * step0`` or
    the budget runs out.

    Raises :class:`BudgetExhausted` only if the budget is zero, so that not
    even ``start`` can be evaluated.
    """
    if not step0 > 0:
        raise ValueError(f"step0 must be positive, got {step0}")
    if budget_remaining is None:
        budget_remaining = cfg.eval_budget
    objective = _as_budgeted(objective, bounds, budget_remaining)
    try:
        _ils(objective, start, step0, cfg.ils_step_shrink, cfg.ils_min_step)
    except BudgetExhausted:
        if objective.best_point is None:
            raise
    return objective.result()


def _expand(sphere, objective, cfg):
    children = decompose(sphere, cfg.inflation)
    for child in children:
        score_sphere(child, objective, probe_ratio=cfg.quality_probe_ratio)
    children.sort(key=Hypersphere.sort_key)
    return children


def fda_solve(objective: Objective, bounds: BoxBounds, cfg: SolverConfig = SolverConfig()) -> SolverResult:
    """Minimise ``objective`` over ``bounds`` with fractal decomposition.

    The result holds the best point and value over every evaluation made.
    Identical inputs always produce identical results.
    """
    cfg.check_dimension(bounds.dim)
    budgeted = BudgetedObjective(objective, bounds, cfg.eval_budget, cfg.record_trace)
    root = unit_root(bounds.dim)
    try:
        score_sphere(root, budgeted, probe_ratio=cfg.quality_probe_ratio)
        # pending[i] holds the scored, not yet visited spheres of level i + 1,
        # best first; only the current branch is kept.
        pending = [_expand(root, budgeted, cfg)]
        while pending:
            level = pending[-1]
            if not level:
                pending.pop()
                continue
            sphere = level.pop(0)
            if sphere.level >= cfg.depth_k:
                step0 = cfg.ils_initial_step_ratio * sphere.radius
                _ils(budgeted, sphere.center, step0, cfg.ils_step_shrink, cfg.ils_min_step)
            else:
                pending.append(_expand(sphere, budgeted, cfg))
    except BudgetExhausted:
        pass
    return budgeted.result()
