"""Built-in test densities for the experiment commands.

* ``sinusoidal``: p(x) = (1 + cos(pi x)) / 2 on [-1, 1], the standard
  1-d compactly supported smooth density used throughout the tests.
* ``piecewise``: p(x) = 0.7 on [-1, 0), 0.3 on [0, 1]; discontinuous,
  used for the Gaussian-vs-Matern boundary-effect comparison.
* ``ring2d``: radially symmetric bump p(r) = (1 + cos(2 pi (r - 1/2)))/pi
  for r <= 1, zero outside the unit disk; evaluated on grids over
  [-1.5, 1.5]^2 so exterior query points are present.

Each density integrates to 1 and carries a deterministic inverse-CDF
sampler driven by a seeded generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np


@dataclass(frozen=True)
class TestDensity:
    name: str
    dim: int
    grid_bounds: Tuple[Tuple[float, float], ...]
    pdf: Callable[[np.ndarray], np.ndarray]
    sample: Callable[[int, np.random.Generator], np.ndarray]


def _sinusoidal_pdf(pts: np.ndarray) -> np.ndarray:
    x = np.asarray(pts, dtype=float).reshape(-1)
    return np.where(np.abs(x) <= 1.0, 0.5 * (1.0 + np.cos(np.pi * x)), 0.0)


def _sinusoidal_cdf(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + 1.0) + np.sin(np.pi * x) / (2.0 * np.pi)


def _invert_cdf(cdf, u: np.ndarray, lo: float, hi: float) -> np.ndarray:
    lo_arr = np.full_like(u, lo)
    hi_arr = np.full_like(u, hi)
    for _ in range(60):
        mid = 0.5 * (lo_arr + hi_arr)
        below = cdf(mid) < u
        lo_arr = np.where(below, mid, lo_arr)
        hi_arr = np.where(below, hi_arr, mid)
    return 0.5 * (lo_arr + hi_arr)


def _sinusoidal_sample(n: int, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(n)
    return _invert_cdf(_sinusoidal_cdf, u, -1.0, 1.0).reshape(-1, 1)


def _piecewise_pdf(pts: np.ndarray) -> np.ndarray:
    x = np.asarray(pts, dtype=float).reshape(-1)
    out = np.zeros_like(x)
    out[(x >= -1.0) & (x < 0.0)] = 0.7
    out[(x >= 0.0) & (x <= 1.0)] = 0.3
    return out


def _piecewise_sample(n: int, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(n)
    v = rng.random(n)
    left = u < 0.7
    x = np.where(left, -1.0 + v, v)
    return x.reshape(-1, 1)


def _ring2d_pdf(pts: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    r = np.sqrt(np.sum(pts * pts, axis=1))
    return np.where(r <= 1.0, (1.0 + np.cos(2.0 * np.pi * (r - 0.5))) / np.pi, 0.0)


def _ring2d_radial_cdf(r: np.ndarray) -> np.ndarray:
    # F(r) = r^2 - r sin(2 pi r)/pi - (cos(2 pi r) - 1)/(2 pi^2)
    return (
        r * r
        - r * np.sin(2.0 * np.pi * r) / np.pi
        - (np.cos(2.0 * np.pi * r) - 1.0) / (2.0 * np.pi**2)
    )


def _ring2d_sample(n: int, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(n)
    r = _invert_cdf(_ring2d_radial_cdf, u, 0.0, 1.0)
    theta = rng.random(n) * 2.0 * np.pi
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


REGISTRY: dict[str, TestDensity] = {
    "sinusoidal": TestDensity(
        "sinusoidal", 1, ((-1.0, 1.0),), _sinusoidal_pdf, _sinusoidal_sample
    ),
    "piecewise": TestDensity(
        "piecewise", 1, ((-1.0, 1.0),), _piecewise_pdf, _piecewise_sample
    ),
    "ring2d": TestDensity(
        "ring2d", 2, ((-1.5, 1.5), (-1.5, 1.5)), _ring2d_pdf, _ring2d_sample
    ),
}


def get_density(name: str) -> TestDensity:
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise ValueError(f"unknown density {name!r}; known: {known}") from None
