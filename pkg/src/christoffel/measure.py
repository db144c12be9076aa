"""Discrete plug-in measures: weighted point clouds.

The empirical Christoffel function is computed against a discrete
measure sum_i eta_i * delta_{x_i} with nonnegative weights.  Two
constructions are standard: uniform weights 1/n on an i.i.d. sample,
and Riemann weights p(x_i) * cell_volume on a regular lattice.
Duplicate points are merged at ingestion by summing their weights,
which leaves every quadratic form sum_i eta_i f(x_i)^2 unchanged and
keeps the Gram structure invertible.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True, eq=False)
class WeightedSample:
    """Distinct points in R^d with nonnegative weights."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float)) + 0.0
        wts = np.asarray(self.weights, dtype=float) + 0.0
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a nonempty (n, d) array")
        if wts.shape != (pts.shape[0],):
            raise ValueError("weights must be a vector matching the point count")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if not np.all(np.isfinite(wts)) or np.any(wts < 0):
            raise ValueError("weights must be finite and nonnegative")
        pts, wts = _merge_duplicates(pts, wts)
        pts.setflags(write=False)
        wts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def total_mass(self) -> float:
        return float(self.weights.sum())


def _merge_duplicates(points: np.ndarray, weights: np.ndarray):
    """Sum weights of exactly-equal rows, keeping first-occurrence order."""
    index_of: dict[bytes, int] = {}
    keep: list[int] = []
    merged = weights.copy()
    for i in range(points.shape[0]):
        key = points[i].tobytes()
        j = index_of.get(key)
        if j is None:
            index_of[key] = i
            keep.append(i)
        else:
            merged[j] += merged[i]
    if len(keep) == points.shape[0]:
        return points.copy(), merged
    keep_arr = np.asarray(keep)
    return points[keep_arr].copy(), merged[keep_arr]


def from_iid_sample(points) -> WeightedSample:
    """Uniform weights 1/n; the Monte Carlo plug-in measure."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise ValueError("empty sample")
    n = pts.shape[0]
    return WeightedSample(pts, np.full(n, 1.0 / n))


def riemann_from_density(grid, density, cell_volume: float | None = None) -> WeightedSample:
    """Riemann plug-in weights eta_i = p(x_i) * cell_volume on a lattice.

    ``grid`` must be a regular axis-aligned lattice; the cell volume is
    inferred from the axis spacings when not given.  Nodes where the
    density vanishes keep zero weight and remain valid query points.
    """
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    if cell_volume is None:
        cell_volume = _infer_cell_volume(pts)
    if not (np.isfinite(cell_volume) and cell_volume > 0):
        raise ValueError(f"cell volume must be positive, got {cell_volume}")
    vals = np.asarray(density(pts), dtype=float).reshape(-1)
    if vals.shape[0] != pts.shape[0]:
        raise ValueError("density must return one value per grid node")
    bad = np.flatnonzero(~np.isfinite(vals) | (vals < 0))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"density is negative or non-finite at node {i}: p={vals[i]}")
    return WeightedSample(pts, vals * cell_volume)


def _infer_cell_volume(points: np.ndarray) -> float:
    volume = 1.0
    for axis in range(points.shape[1]):
        coords = np.unique(points[:, axis])
        if coords.size < 2:
            raise ValueError(
                f"cannot infer lattice spacing along axis {axis}; pass cell_volume"
            )
        gaps = np.diff(coords)
        step = gaps.min()
        if np.any(np.abs(gaps / step - np.round(gaps / step)) > 1e-8):
            raise ValueError(f"grid is not a regular lattice along axis {axis}")
        volume *= step
    return volume


def grid_1d(a: float, b: float, n: int) -> np.ndarray:
    """Cell-centered lattice of n nodes covering [a, b], shape (n, 1)."""
    if n < 1 or b <= a:
        raise ValueError("need n >= 1 and b > a")
    h = (b - a) / n
    return (a + (np.arange(n) + 0.5) * h).reshape(-1, 1)


def grid_2d(a: float, b: float, m: int) -> np.ndarray:
    """Cell-centered m x m lattice covering [a, b]^2, shape (m*m, 2)."""
    ax = grid_1d(a, b, m)[:, 0]
    xx, yy = np.meshgrid(ax, ax, indexing="ij")
    return np.column_stack([xx.ravel(), yy.ravel()])


def load_csv(path) -> WeightedSample:
    """Read a weighted sample from CSV.

    Expected header: columns ``x1``..``xd`` and optionally ``weight``.
    Without a weight column, uniform weights 1/n are used.  Parsing is
    locale independent (decimal point, no thousands separators).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        d = 0
        while d < len(header) and header[d] == f"x{d + 1}":
            d += 1
        if d == 0:
            raise ValueError(f"{path}: header must start with columns x1..xd")
        rest = header[d:]
        if rest and rest != ["weight"]:
            raise ValueError(
                f"{path}: unexpected columns after x1..x{d}: {rest}"
            )
        has_weight = bool(rest)
        rows: list[list[float]] = []
        wts: list[float] = []
        expected = d + (1 if has_weight else 0)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != expected:
                raise ValueError(
                    f"{path}: line {lineno}: expected {expected} fields, got {len(row)}"
                )
            try:
                vals = [float(cell) for cell in row]
            except ValueError:
                raise ValueError(
                    f"{path}: line {lineno}: non-numeric cell in {row!r}"
                ) from None
            if has_weight:
                if vals[-1] < 0:
                    raise ValueError(f"{path}: line {lineno}: negative weight {vals[-1]}")
                wts.append(vals[-1])
                rows.append(vals[:-1])
            else:
                rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    pts = np.asarray(rows, dtype=float)
    if has_weight:
        return WeightedSample(pts, np.asarray(wts))
    return from_iid_sample(pts)
