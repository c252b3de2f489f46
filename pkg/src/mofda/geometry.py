"""Hyperspheres in the unit box and their fractal decomposition.

All search happens in ``[0, 1]^D``; problem bounds are applied only when a
point is evaluated (:func:`to_problem_space`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import DimensionError

DEFAULT_INFLATION = 1.75


@dataclass
class Hypersphere:
    """A search region: centre and radius in unit-box coordinates.

    ``quality`` is filled in by the solver once the sphere has been scored
    (lower is better). ``id_path`` lists the child indices taken from the
    root and gives every sphere a deterministic identity used for tie-breaks.
    """

    center: tuple[float, ...]
    radius: float
    level: int = 0
    quality: float | None = None
    id_path: tuple[int, ...] = field(default=())

    def __post_init__(self):
        self.center = tuple(float(c) for c in self.center)
        if not self.center:
            raise DimensionError("hypersphere centre must have at least one component")
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.level < 0:
            raise ValueError(f"level must be non-negative, got {self.level}")
        if len(self.id_path) != self.level:
            raise ValueError("id_path length must equal level")

    @property
    def dim(self) -> int:
        return len(self.center)

    def sort_key(self):
        return (self.quality, self.id_path)


@dataclass(frozen=True)
class BoxBounds:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) != len(upper):
            raise DimensionError(
                f"lower has {len(lower)} components but upper has {len(upper)}"
            )
        if not lower:
            raise DimensionError("bounds must have at least one dimension")
        for d, (lo, hi) in enumerate(zip(lower, upper)):
            if not lo < hi:
                raise ValueError(f"bounds[{d}]: lower {lo} is not below upper {hi}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def uniform(cls, dim: int, lower: float, upper: float) -> "BoxBounds":
        return cls((lower,) * dim, (upper,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def contains(self, x: Sequence[float]) -> bool:
        return len(x) == self.dim and all(
            lo <= v <= hi for v, lo, hi in zip(x, self.lower, self.upper)
        )


def unit_root(dim: int) -> Hypersphere:
    """Level-0 sphere inscribed in the unit box."""
    if dim < 1:
        raise DimensionError(f"dimension must be >= 1, got {dim}")
    return Hypersphere(center=(0.5,) * dim, radius=0.5)


def decompose(parent: Hypersphere, inflation: float = DEFAULT_INFLATION) -> list[Hypersphere]:
    """Split ``parent`` into ``2 * D`` children placed along the coordinate axes.

    Child ``j`` sits at ``parent.center + s * (r / 2) * e_d`` with ``d = j // 2``
    and ``s = +1`` for even ``j``, ``-1`` for odd ``j``. Its radius is
    ``inflation * r / 2``; an inflation above 1 makes neighbouring children
    overlap so that no part of the parent is left uncovered.
    """
    half = parent.radius / 2.0
    child_radius = inflation * half
    level = parent.level + 1
    children = []
    for j in range(2 * parent.dim):
        d, sign = divmod(j, 2)
        center = list(parent.center)
        center[d] += half if sign == 0 else -half
        children.append(
            Hypersphere(
                center=tuple(center),
                radius=child_radius,
                level=level,
                id_path=parent.id_path + (j,),
            )
        )
    return children


def to_problem_space(x_unit: Sequence[float], bounds: BoxBounds) -> np.ndarray:
    """Map a unit-box point to problem coordinates, clamping overhang first."""
    if len(x_unit) != bounds.dim:
        raise DimensionError(
            f"point has {len(x_unit)} components, bounds have {bounds.dim}"
        )
    return np.array(_to_problem_list(x_unit, bounds.lower, bounds.upper, _widths(bounds)))


def _widths(bounds: BoxBounds) -> tuple[float, ...]:
    return tuple(hi - lo for lo, hi in zip(bounds.lower, bounds.upper))


def _to_problem_list(x_unit, lower, upper, widths) -> list[float]:
    # Hot path: shared by the solver so that both routes round identically.
    # lo + 1.0 * (hi - lo) can overshoot hi by one ulp, hence the final min.
    return [
        lo if v <= 0.0 else hi if v >= 1.0 else min(lo + v * w, hi)
        for v, lo, hi, w in zip(x_unit, lower, upper, widths)
    ]
