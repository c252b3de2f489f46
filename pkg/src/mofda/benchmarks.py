"""ZDT and DTLZ test problems with analytic Pareto-front samplers.

Objective functions are written in plain Python over sequences of floats:
the solver calls them hundreds of thousands of times on 7 to 30 variables,
where per-call numpy overhead dominates the arithmetic.

References:
    Zitzler, Deb & Thiele (2000). Comparison of multiobjective evolutionary
    algorithms: empirical results. Evolutionary Computation 8(2).
    Deb, Thiele, Laumanns & Zitzler (2005). Scalable test problems for
    evolutionary multiobjective optimization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .exceptions import DimensionError, DomainError, UnknownProblemError
from .geometry import BoxBounds

_PI = math.pi
_HALF_PI = math.pi / 2


@dataclass(frozen=True)
class BenchmarkProblem:
    """A box-constrained multiobjective test problem (all objectives minimised).

    ``objectives`` is the unchecked fast path used inside the solver;
    :meth:`evaluate` validates its input and returns an array.
    """

    name: str
    n_var: int
    n_obj: int
    bounds: BoxBounds
    objectives: Callable[[Sequence[float]], tuple]
    front_sampler: Callable[[int], np.ndarray]

    @property
    def ideal_point(self) -> tuple[float, ...]:
        # Every problem in the registry has its ideal point at the origin.
        return (0.0,) * self.n_obj

    def evaluate(self, x) -> np.ndarray:
        x = [float(v) for v in np.asarray(x, dtype=float).ravel()]
        if len(x) != self.n_var:
            raise DimensionError(f"{self.name} expects {self.n_var} variables, got {len(x)}")
        if not self.bounds.contains(x):
            raise DomainError(f"point lies outside the bounds of {self.name}")
        return np.array(self.objectives(x), dtype=float)

    def true_front(self, count: int) -> "TrueFront":
        if count < 2:
            raise ValueError(f"count must be >= 2, got {count}")
        return TrueFront(self.front_sampler(count), self.name)


@dataclass(frozen=True)
class TrueFront:
    points: np.ndarray
    problem_name: str

    def __len__(self):
        return len(self.points)


# --- objective functions -------------------------------------------------


def _zdt_g_linear(x):
    return 1.0 + 9.0 * sum(x[1:]) / (len(x) - 1)


def zdt1(x):
    f1 = x[0]
    g = _zdt_g_linear(x)
    return (f1, g * (1.0 - math.sqrt(f1 / g)))


def zdt2(x):
    f1 = x[0]
    g = _zdt_g_linear(x)
    return (f1, g * (1.0 - (f1 / g) ** 2))


def zdt3(x):
    f1 = x[0]
    g = _zdt_g_linear(x)
    r = f1 / g
    return (f1, g * (1.0 - math.sqrt(r) - r * math.sin(10.0 * _PI * f1)))


def zdt4(x):
    f1 = x[0]
    g = 1.0 + 10.0 * (len(x) - 1)
    for v in x[1:]:
        g += v * v - 10.0 * math.cos(4.0 * _PI * v)
    return (f1, g * (1.0 - math.sqrt(f1 / g)))


def zdt6(x):
    x1 = x[0]
    f1 = 1.0 - math.exp(-4.0 * x1) * math.sin(6.0 * _PI * x1) ** 6
    g = 1.0 + 9.0 * (sum(x[1:]) / (len(x) - 1)) ** 0.25
    return (f1, g * (1.0 - (f1 / g) ** 2))


def _dtlz_g_rastrigin(tail):
    g = float(len(tail))
    for v in tail:
        u = v - 0.5
        g += u * u - math.cos(20.0 * _PI * u)
    return 100.0 * g


def _dtlz_g_sphere(tail):
    g = 0.0
    for v in tail:
        u = v - 0.5
        g += u * u
    return g


def dtlz1(x):
    x1, x2 = x[0], x[1]
    s = 0.5 * (1.0 + _dtlz_g_rastrigin(x[2:]))
    return (s * x1 * x2, s * x1 * (1.0 - x2), s * (1.0 - x1))


def _dtlz_sphere_objectives(x, g):
    a, b = x[0] * _HALF_PI, x[1] * _HALF_PI
    r = 1.0 + g
    return (r * math.cos(a) * math.cos(b), r * math.cos(a) * math.sin(b), r * math.sin(a))


def dtlz2(x):
    return _dtlz_sphere_objectives(x, _dtlz_g_sphere(x[2:]))


def dtlz3(x):
    return _dtlz_sphere_objectives(x, _dtlz_g_rastrigin(x[2:]))


# --- true fronts -----------------------------------------------------------


def _equal_chord_samples(curve, count):
    """``count`` points on a monotone planar curve with equal consecutive gaps.

    ``curve`` maps ``s`` in [0, 1] to an (f1, f2) pair with f1 increasing and
    f2 decreasing, so the distance from a fixed point grows along the curve.
    The gap is found by shooting: walk ``count - 1`` chords from ``s = 0`` and
    adjust the chord length until the walk ends exactly at ``s = 1``.
    """
    from scipy.optimize import brentq

    start, end = curve(0.0), curve(1.0)
    steps = count - 1

    def walk(chord):
        s, p = 0.0, start
        params = [0.0]
        for i in range(steps):
            remaining = math.dist(p, end)
            if remaining < chord:
                # Ran out of curve; positive and growing with the shortfall.
                return params, (steps - i - 1) + (chord - remaining) / chord
            s = brentq(lambda t: math.dist(p, curve(t)) - chord, s, 1.0,
                       xtol=1e-300, rtol=4 * np.finfo(float).eps)
            p = curve(s)
            params.append(s)
        return params, -math.dist(p, end) / chord

    # The sum of the chords lies between the straight-line distance and the
    # arc length, which brackets the root.
    fine = [curve(t) for t in np.linspace(0.0, 1.0, 4097)]
    arc = sum(math.dist(a, b) for a, b in zip(fine, fine[1:]))
    lo, hi = 0.99 * math.dist(start, end) / steps, 1.01 * arc / steps
    chord = brentq(lambda c: walk(c)[1], lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    params, _ = walk(chord)
    if len(params) < count:
        params.append(1.0)
    params[-1] = 1.0
    return np.array([curve(s) for s in params])


def _zdt1_curve(s):
    return (s * s, 1.0 - s)


def _zdt2_curve(s):
    return (s, 1.0 - s * s)


@lru_cache(maxsize=None)
def zdt6_min_f1() -> float:
    """Smallest attainable f1 of ZDT6 (about 0.2807753191)."""
    from scipy.optimize import minimize_scalar

    res = minimize_scalar(
        lambda x1: 1.0 - math.exp(-4.0 * x1) * math.sin(6.0 * _PI * x1) ** 6,
        bounds=(0.0, 1.0 / 6.0),
        method="bounded",
        options={"xatol": 1e-14},
    )
    return float(res.fun)


def _zdt6_curve(s):
    lo = zdt6_min_f1()
    f1 = lo + (1.0 - lo) * s if s < 1.0 else 1.0
    return (f1, 1.0 - f1 * f1)


def _curve_front(curve):
    @lru_cache(maxsize=16)
    def sample(count):
        pts = _equal_chord_samples(curve, count)
        pts.flags.writeable = False
        return pts

    return lambda count: sample(count).copy()


def _zdt3_front(count, density=200_001):
    f1 = np.linspace(0.0, 1.0, max(density, 10 * count))
    f2 = 1.0 - np.sqrt(f1) - f1 * np.sin(10.0 * np.pi * f1)
    # f1 is increasing, so a point survives iff its f2 beats every earlier f2.
    prev_min = np.minimum.accumulate(np.concatenate(([np.inf], f2[:-1])))
    keep = f2 < prev_min
    front = np.column_stack((f1[keep], f2[keep]))
    idx = np.unique(np.round(np.linspace(0, len(front) - 1, count)).astype(int))
    return front[idx]


def _simplex_lattice(count):
    h = 1
    while math.comb(h + 2, 2) < count:
        h += 1
    return np.array([(i / h, j / h, (h - i - j) / h) for i in range(h + 1) for j in range(h + 1 - i)])


def _dtlz1_front(count):
    return 0.5 * _simplex_lattice(count)


def _dtlz_sphere_front(count):
    lattice = _simplex_lattice(count)
    return lattice / np.linalg.norm(lattice, axis=1, keepdims=True)


# --- registry ----------------------------------------------------------------

_zdt1_sampler = _curve_front(_zdt1_curve)
_zdt2_sampler = _curve_front(_zdt2_curve)
_zdt6_sampler = _curve_front(_zdt6_curve)


def _zdt4_bounds(n):
    return BoxBounds((0.0,) + (-5.0,) * (n - 1), (1.0,) + (5.0,) * (n - 1))


# name -> (objectives, default n_var, n_obj, bounds factory, front sampler)
_REGISTRY = {
    "zdt1": (zdt1, 30, 2, None, _zdt1_sampler),
    "zdt2": (zdt2, 30, 2, None, _zdt2_sampler),
    "zdt3": (zdt3, 30, 2, None, _zdt3_front),
    "zdt4": (zdt4, 10, 2, _zdt4_bounds, _zdt1_sampler),
    "zdt6": (zdt6, 10, 2, None, _zdt6_sampler),
    "dtlz1": (dtlz1, 7, 3, None, _dtlz1_front),
    "dtlz2": (dtlz2, 12, 3, None, _dtlz_sphere_front),
    "dtlz3": (dtlz3, 12, 3, None, _dtlz_sphere_front),
}

PROBLEM_NAMES = tuple(_REGISTRY)


def get_problem(name: str, n_var: int | None = None) -> BenchmarkProblem:
    key = str(name).lower()
    if key not in _REGISTRY:
        raise UnknownProblemError(
            f"unknown problem {name!r}; known problems: {', '.join(PROBLEM_NAMES)}"
        )
    fn, default_n, n_obj, bounds_factory, sampler = _REGISTRY[key]
    n = default_n if n_var is None else int(n_var)
    if n < n_obj:
        raise DimensionError(f"{key} needs at least {n_obj} variables, got {n}")
    bounds = bounds_factory(n) if bounds_factory else BoxBounds.uniform(n, 0.0, 1.0)
    return BenchmarkProblem(key, n, n_obj, bounds, fn, sampler)


def evaluate(name: str, x) -> np.ndarray:
    """Objective vector of problem ``name`` at ``x`` (length picks the dimension)."""
    return get_problem(name, n_var=len(x)).evaluate(x)


def true_front(name: str, count: int) -> TrueFront:
    """Analytic samples of the Pareto front of ``name``.

    Biobjective continuous fronts get exactly ``count`` points with equal
    Euclidean gaps between neighbours, endpoints included. ZDT3 gets
    ``count`` points picked evenly from a dense nondominated sample. The
    DTLZ fronts get the smallest full simplex lattice with at least
    ``count`` points (projected onto the sphere for DTLZ2 and DTLZ3).
    """
    return get_problem(name).true_front(count)
