"""Weighted Tchebycheff scalarization and simplex weight families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .exceptions import DimensionError, UnsupportedObjectiveCountError

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class WeightVector:
    components: tuple[float, ...]
    index: int = 0

    def __post_init__(self):
        comps = tuple(float(c) for c in self.components)
        if any(c < 0 or not math.isfinite(c) for c in comps):
            raise ValueError(f"weights must be finite and non-negative, got {comps}")
        if abs(math.fsum(comps) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights must sum to 1, got {math.fsum(comps)!r}")
        object.__setattr__(self, "components", comps)

    def __len__(self):
        return len(self.components)


@dataclass(frozen=True)
class ReferencePoint:
    """Ideal point ``z*``, optionally pushed down by ``utopian_shift``."""

    z_star: tuple[float, ...]
    utopian_shift: float = 0.0

    def __post_init__(self):
        z = tuple(float(v) for v in self.z_star)
        if not all(math.isfinite(v) for v in z):
            raise ValueError("reference point must be finite")
        if self.utopian_shift < 0:
            raise ValueError("utopian_shift must be non-negative")
        object.__setattr__(self, "z_star", z)

    @property
    def shifted(self) -> tuple[float, ...]:
        return tuple(v - self.utopian_shift for v in self.z_star)


def tchebycheff(f_values: Sequence[float], w: WeightVector, z: ReferencePoint) -> float:
    """``max_i w_i * (f_i - (z_i - shift))``."""
    if not len(f_values) == len(w.components) == len(z.z_star):
        raise DimensionError(
            f"lengths disagree: f={len(f_values)}, w={len(w.components)}, z={len(z.z_star)}"
        )
    return _tcheby(f_values, w.components, z.shifted)


def _tcheby(f_values, weights, zs):
    return max([wi * (float(fi) - zi) for fi, wi, zi in zip(f_values, weights, zs)])


def generate_weights(m: int, n: int) -> list[WeightVector]:
    """``n`` evenly spread weight vectors on the ``m``-simplex.

    Two objectives: ``(i / (n - 1), 1 - i / (n - 1))`` for ``i = 0 .. n - 1``.
    Three objectives: the simplex lattice with the smallest number of
    divisions ``H`` giving at least ``n`` points, listed in lexicographic
    order and cut to the first ``n``.
    """
    if n < 2:
        raise ValueError(f"need at least 2 weight vectors, got {n}")
    if m == 2:
        return [WeightVector((i / (n - 1), 1.0 - i / (n - 1)), i) for i in range(n)]
    if m == 3:
        h = 1
        while math.comb(h + 2, 2) < n:
            h += 1
        out = []
        for i in range(h + 1):
            for j in range(h + 1 - i):
                if len(out) == n:
                    return out
                a, b = i / h, j / h
                out.append(WeightVector((a, b, (h - i - j) / h), len(out)))
        return out
    raise UnsupportedObjectiveCountError(f"weight generation supports 2 or 3 objectives, not {m}")


def scalarize_problem(problem, w: WeightVector, z: ReferencePoint | None = None):
    """Single-objective view of ``problem`` for weight ``w``.

    The returned callable takes a decision vector and gives its Tchebycheff
    value; it uses the problem's unchecked fast path, so it is meant for
    points produced inside the bounds (as the solver does).
    """
    if z is None:
        z = ReferencePoint(problem.ideal_point)
    if not problem.n_obj == len(w.components) == len(z.z_star):
        raise DimensionError(
            f"{problem.name} has {problem.n_obj} objectives but weight has "
            f"{len(w.components)} and reference point {len(z.z_star)}"
        )
    objectives = problem.objectives
    weights = w.components
    zs = z.shifted

    def scalarized(x):
        return _tcheby(objectives(x), weights, zs)

    return scalarized
