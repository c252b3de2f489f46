"""Quality indicators for Pareto-front approximations.

Conventions used throughout (and written into CSV headers by the CLI):

* generational distance is the plain mean of nearest distances (exponent 1);
* the default hypervolume reference point is ``ideal + 1.1 * (nadir - ideal)``
  of the true front's bounding box;
* spread is Deb's Delta for two objectives and the nearest-neighbour
  generalisation (Zhou et al. 2006) for three.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, UndefinedMetricError, UnsupportedObjectiveCountError

GD_EXPONENT = 1
HV_REF_FACTOR = 1.1


class EmptyFrontWarning(UserWarning):
    """No point of the front lies strictly inside the reference box."""


@dataclass(frozen=True)
class MetricReport:
    hypervolume: float
    gd: float
    igd: float
    spread: float
    reference_point: tuple[float, ...]

    def as_rows(self) -> list[tuple[str, float]]:
        return [
            ("hypervolume", self.hypervolume),
            ("gd", self.gd),
            ("igd", self.igd),
            ("spread", self.spread),
        ]


def as_front(points) -> np.ndarray:
    """Validate and convert a point set to a 2-D float array."""
    arr = np.asarray(getattr(points, "points", points), dtype=float)
    if arr.ndim == 1 and arr.size:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"expected a nonempty (n, m) point array, got shape {arr.shape}")
    return arr


def _hv2d(points, ref):
    # points already strictly inside the reference box
    order = np.lexsort((points[:, 1], points[:, 0]))
    area = 0.0
    prev = ref[1]
    for f1, f2 in points[order]:
        if f2 < prev:
            area += (ref[0] - f1) * (prev - f2)
            prev = f2
    return area


def _hv3d(points, ref):
    order = np.argsort(points[:, 2], kind="stable")
    pts = points[order]
    volume = 0.0
    for i in range(len(pts)):
        top = pts[i + 1, 2] if i + 1 < len(pts) else ref[2]
        depth = top - pts[i, 2]
        if depth > 0:
            volume += _hv2d(pts[: i + 1, :2], ref[:2]) * depth
    return volume


def hypervolume(front, ref) -> float:
    """Exact volume of objective space dominated by ``front`` and bounded by ``ref``.

    Points with any coordinate at or beyond ``ref`` contribute nothing and
    are dropped first. Two objectives use a sorted sweep, three objectives
    slice along the last axis and sweep each slab.
    """
    pts = as_front(front)
    ref = np.asarray(ref, dtype=float)
    m = pts.shape[1]
    if ref.shape != (m,):
        raise DimensionError(f"reference point has shape {ref.shape}, front has {m} objectives")
    if m not in (2, 3):
        raise UnsupportedObjectiveCountError(f"hypervolume supports 2 or 3 objectives, not {m}")
    pts = pts[np.all(pts < ref, axis=1)]
    if len(pts) == 0:
        warnings.warn("no point dominates the reference point; hypervolume is 0",
                      EmptyFrontWarning, stacklevel=2)
        return 0.0
    return float(_hv2d(pts, ref) if m == 2 else _hv3d(pts, ref))


def _nearest(from_pts, to_pts):
    diff = from_pts[:, None, :] - to_pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff)).min(axis=1)


def gd(approx, truth) -> float:
    """Mean distance from each approximation point to its nearest true point."""
    a, t = as_front(approx), as_front(truth)
    if a.shape[1] != t.shape[1]:
        raise DimensionError("approximation and truth have different objective counts")
    return float(_nearest(a, t).mean())


def igd(approx, truth) -> float:
    """Mean distance from each true point to its nearest approximation point."""
    return gd(truth, approx)


def _extremes(truth):
    # One extreme per objective: the true point with the largest value there.
    # For a biobjective front these are its two ends.
    idx = []
    for j in range(truth.shape[1]):
        col = truth[:, j]
        idx.append(np.flatnonzero(col == col.max())[0])
    return truth[idx]


def spread(approx, truth) -> float:
    """Spread (Delta) of an approximation relative to the true front's extremes.

    Zero means evenly spaced points that reach the ends of the true front.
    """
    a, t = as_front(approx), as_front(truth)
    n, m = a.shape
    if t.shape[1] != m:
        raise DimensionError("approximation and truth have different objective counts")
    if n < 2:
        raise UndefinedMetricError("spread needs at least two points")
    if m == 2:
        a = a[np.lexsort((a[:, 1], a[:, 0]))]
        t = t[np.lexsort((t[:, 1], t[:, 0]))]
        gaps = np.linalg.norm(np.diff(a, axis=0), axis=1)
        d_mean = gaps.mean()
        d_f = np.linalg.norm(a[0] - t[0])
        d_l = np.linalg.norm(a[-1] - t[-1])
        num = d_f + d_l + np.abs(gaps - d_mean).sum()
        den = d_f + d_l + (n - 1) * d_mean
    else:
        diff = a[:, None, :] - a[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        np.fill_diagonal(dist, np.inf)
        nn = dist.min(axis=1)
        d_mean = nn.mean()
        d_ext = _nearest(_extremes(t), a).sum()
        num = d_ext + np.abs(nn - d_mean).sum()
        den = d_ext + n * d_mean
    if den == 0:
        return 0.0
    return float(num / den)


def default_reference_point(truth) -> np.ndarray:
    """``ideal + 1.1 * (nadir - ideal)`` of the true front's bounding box."""
    t = as_front(truth)
    lo, hi = t.min(axis=0), t.max(axis=0)
    return lo + HV_REF_FACTOR * (hi - lo)


def evaluate_front(approx, truth, ref=None) -> MetricReport:
    t = as_front(truth)
    ref = default_reference_point(t) if ref is None else np.asarray(ref, dtype=float)
    return MetricReport(
        hypervolume=hypervolume(approx, ref),
        gd=gd(approx, t),
        igd=igd(approx, t),
        spread=spread(approx, t),
        reference_point=tuple(float(v) for v in ref),
    )
