"""Translation-invariant kernel families and their spectral densities.

A kernel is described by a radial space-domain profile q (the kernel is
k(x, y) = q(x - y), depending only on ||x - y||) together with its
radial Fourier transform q_hat, which is strictly positive for every
family implemented here.  Three families are built in:

* ``Matern(nu, length)``: smoothness nu > 0 and length scale l > 0,

      q(x)      = 2^(1-nu)/Gamma(nu) * z^nu * K_nu(z),  z = sqrt(2 nu) ||x|| / l
      q_hat(w)  = c(nu, l, d) / (2 nu / l^2 + ||w||^2)^(nu + d/2)

  with c chosen so that q(0) = 1.  nu = 1/2 reduces to the exponential
  (Laplace) kernel exp(-||x||/l).  Its reproducing space is a Sobolev
  space with polynomial spectral decay exponents s = 1, gamma = nu + d/2.

* ``Gaussian(length)``: q(x) = exp(-||x||^2 / l) with
  q_hat(w) = (pi l)^(d/2) exp(-l ||w||^2 / 4).  The spectral decay is
  faster than any polynomial, so no Sobolev exponents exist.

* ``RadialProfile(q_hat_of_r, s, gamma)``: a user-supplied strictly
  positive radial spectral profile with stated decay exponents, i.e.
  q_hat(w) ~ const * ||w||^(-2 s gamma) at infinity with 2 s gamma > d.
  The space profile is recovered by numerical inverse Fourier transform
  (dimensions 1 and 2).

Kernel sums are supported through ``kernel_sum`` for monotonicity
experiments; sums have no polynomial decay exponents of their own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import gamma as gamma_fn

from . import backends
from .quadrature import (
    bracket_decay_scale,
    cos_transform,
    hankel0_transform,
    radial_integral,
)


def _surface_area(d: int) -> float:
    """Surface area of the unit sphere in R^d."""
    return 2.0 * np.pi ** (d / 2.0) / gamma_fn(d / 2.0)


@dataclass(frozen=True)
class Matern:
    nu: float
    length: float

    def __post_init__(self):
        if not (np.isfinite(self.nu) and self.nu > 0):
            raise ValueError(f"Matern smoothness nu must be positive, got {self.nu}")
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError(f"Matern length scale must be positive, got {self.length}")

    def spectral_params(self, d: int) -> Tuple[float, float, float]:
        """(c, b, g) with q_hat(r) = c / (b + r^2)^g."""
        b = 2.0 * self.nu / self.length**2
        g = self.nu + d / 2.0
        c = (
            2.0**d
            * np.pi ** (d / 2.0)
            * gamma_fn(self.nu + d / 2.0)
            * (2.0 * self.nu) ** self.nu
            / (gamma_fn(self.nu) * self.length ** (2.0 * self.nu))
        )
        return c, b, g

    def profile(self, r: np.ndarray, d: int) -> np.ndarray:
        return backends.matern_profile(r, self.nu, self.length)

    def spectral(self, r: np.ndarray, d: int) -> np.ndarray:
        c, b, g = self.spectral_params(d)
        r = np.asarray(r, dtype=float)
        return c / (b + r * r) ** g

    def q_zero(self, d: int) -> float:
        return 1.0

    def sobolev_exponents(self, d: int) -> Optional[Tuple[float, float]]:
        return 1.0, self.nu + d / 2.0


@dataclass(frozen=True)
class Gaussian:
    length: float

    def __post_init__(self):
        if not (np.isfinite(self.length) and self.length > 0):
            raise ValueError(f"Gaussian length scale must be positive, got {self.length}")

    def profile(self, r: np.ndarray, d: int) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return np.exp(-r * r / self.length)

    def spectral(self, r: np.ndarray, d: int) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return (np.pi * self.length) ** (d / 2.0) * np.exp(
            -self.length * r * r / 4.0
        )

    def q_zero(self, d: int) -> float:
        return 1.0

    def sobolev_exponents(self, d: int) -> Optional[Tuple[float, float]]:
        return None


@dataclass(frozen=True)
class RadialProfile:
    """Kernel given directly by a radial spectral density.

    ``q_hat_of_r`` maps an array of radii to strictly positive values and
    must decay like r^(-2 s gamma); non-radial spectral densities are out
    of scope and cannot be expressed here.
    """

    q_hat_of_r: Callable[[np.ndarray], np.ndarray]
    s: float
    gamma: float

    def __post_init__(self):
        if not (np.isfinite(self.s) and self.s > 0):
            raise ValueError(f"decay exponent s must be positive, got {self.s}")
        if not (np.isfinite(self.gamma) and self.gamma >= 1):
            raise ValueError(f"decay exponent gamma must be >= 1, got {self.gamma}")
        probe = self.q_hat_of_r(np.geomspace(1e-3, 1e3, 25))
        if not np.all(np.isfinite(probe)) or np.any(probe <= 0):
            raise ValueError("spectral profile must be finite and strictly positive")

    def profile(self, r: np.ndarray, d: int) -> np.ndarray:
        if d not in (1, 2):
            raise ValueError("RadialProfile space evaluation supports d in {1, 2}")
        r = np.asarray(r, dtype=float)
        scale = self._decay_scale()
        out = np.empty(r.shape)
        flat = r.ravel()
        res = out.ravel()
        for i, rho in enumerate(flat):
            if d == 1:
                res[i] = cos_transform(self.q_hat_of_r, rho, scale) / np.pi
            else:
                res[i] = hankel0_transform(self.q_hat_of_r, rho, scale) / (2.0 * np.pi)
        return out

    def spectral(self, r: np.ndarray, d: int) -> np.ndarray:
        return np.asarray(self.q_hat_of_r(np.asarray(r, dtype=float)), dtype=float)

    def _decay_scale(self) -> float:
        peak = float(self.q_hat_of_r(np.array([0.0]))[0])
        return bracket_decay_scale(
            lambda r: float(self.q_hat_of_r(np.array([r]))[0]), peak / 2.0
        )

    def q_zero(self, d: int) -> float:
        scale = self._decay_scale()
        integral = radial_integral(
            lambda r: self.q_hat_of_r(np.atleast_1d(r))[0] * r ** (d - 1), scale
        )
        return _surface_area(d) * integral / (2.0 * np.pi) ** d

    def sobolev_exponents(self, d: int) -> Optional[Tuple[float, float]]:
        return self.s, self.gamma


@dataclass(frozen=True)
class SumFamily:
    """Sum of kernel families; used for kernel-monotonicity experiments."""

    parts: Tuple

    def profile(self, r: np.ndarray, d: int) -> np.ndarray:
        out = self.parts[0].profile(r, d)
        for part in self.parts[1:]:
            out = out + part.profile(r, d)
        return out

    def spectral(self, r: np.ndarray, d: int) -> np.ndarray:
        out = self.parts[0].spectral(r, d)
        for part in self.parts[1:]:
            out = out + part.spectral(r, d)
        return out

    def q_zero(self, d: int) -> float:
        return float(sum(part.q_zero(d) for part in self.parts))

    def sobolev_exponents(self, d: int) -> Optional[Tuple[float, float]]:
        return None


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family fixed to an ambient dimension."""

    family: object
    dimension: int

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dimension}")
        exps = self.family.sobolev_exponents(self.dimension)
        if exps is not None:
            s, g = exps
            if 2.0 * s * g <= self.dimension:
                raise ValueError(
                    f"spectral decay too slow: need 2*s*gamma > d, got "
                    f"2*{s}*{g} <= {self.dimension}"
                )

    def q_zero(self) -> float:
        return self.family.q_zero(self.dimension)

    def sobolev_exponents(self) -> Optional[Tuple[float, float]]:
        return self.family.sobolev_exponents(self.dimension)


def matern(nu: float, length: float, dimension: int) -> KernelSpec:
    return KernelSpec(Matern(nu, length), dimension)


def gaussian(length: float, dimension: int) -> KernelSpec:
    return KernelSpec(Gaussian(length), dimension)


def radial_profile_kernel(q_hat_of_r, s: float, gamma: float, dimension: int) -> KernelSpec:
    return KernelSpec(RadialProfile(q_hat_of_r, s, gamma), dimension)


def kernel_sum(*specs: KernelSpec) -> KernelSpec:
    dims = {spec.dimension for spec in specs}
    if len(dims) != 1:
        raise ValueError("summed kernels must share the ambient dimension")
    parts = []
    for spec in specs:
        if isinstance(spec.family, SumFamily):
            parts.extend(spec.family.parts)
        else:
            parts.append(spec.family)
    return KernelSpec(SumFamily(tuple(parts)), dims.pop())


def _as_points(x, d: int) -> Tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        if d != 1:
            raise ValueError(f"scalar point given for dimension {d}")
        return arr.reshape(1, 1), True
    if arr.ndim == 1:
        if arr.shape[0] != d:
            raise ValueError(f"point has {arr.shape[0]} coordinates, expected {d}")
        return arr.reshape(1, d), True
    if arr.ndim == 2 and arr.shape[1] == d:
        return arr, False
    raise ValueError(f"cannot interpret shape {arr.shape} as points in R^{d}")


def eval_q(spec: KernelSpec, x):
    """Space-domain kernel profile q(x) = k(x, 0)."""
    pts, single = _as_points(x, spec.dimension)
    if not np.all(np.isfinite(pts)):
        raise ValueError("eval_q: point coordinates must be finite")
    r = np.sqrt(np.sum(pts * pts, axis=1))
    vals = spec.family.profile(r, spec.dimension)
    if not np.all(np.isfinite(vals)):
        bad = r[~np.isfinite(vals)][0]
        raise OverflowError(f"kernel profile evaluation failed at radius {bad}")
    return float(vals[0]) if single else vals


def eval_q_hat(spec: KernelSpec, omega):
    """Spectral density q_hat(omega); strictly positive."""
    pts, single = _as_points(omega, spec.dimension)
    if not np.all(np.isfinite(pts)):
        raise ValueError("eval_q_hat: frequency coordinates must be finite")
    r = np.sqrt(np.sum(pts * pts, axis=1))
    vals = spec.family.spectral(r, spec.dimension)
    return float(vals[0]) if single else vals


def gram_matrix(spec: KernelSpec, points: np.ndarray) -> np.ndarray:
    """Symmetric kernel matrix K_ij = q(x_i - x_j)."""
    points = np.ascontiguousarray(points, dtype=float)
    r = backends.pairwise_dists(points, points)
    k = spec.family.profile(r, spec.dimension)
    # enforce exact symmetry against rounding in the distance computation
    return 0.5 * (k + k.T)


def cross_matrix(spec: KernelSpec, queries: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Rectangular kernel matrix k(z_i, x_j) for queries z against points x."""
    queries = np.ascontiguousarray(queries, dtype=float)
    points = np.ascontiguousarray(points, dtype=float)
    r = backends.pairwise_dists(queries, points)
    return spec.family.profile(r, spec.dimension)


def fourier_roundtrip_check(spec: KernelSpec, points) -> float:
    """Max deviation between q and the numerical inverse transform of q_hat.

    Self-test of the q / q_hat pairing (it is not used in the estimation
    path).  Supported for dimensions 1 and 2.
    """
    d = spec.dimension
    if d not in (1, 2):
        raise ValueError("fourier_roundtrip_check supports d in {1, 2}")
    pts, _ = _as_points(points, d)
    if not np.all(np.isfinite(pts)):
        raise ValueError("fourier_roundtrip_check: points must be finite")

    def q_hat_radial(r):
        return spec.family.spectral(np.atleast_1d(r), d)[0]

    peak = q_hat_radial(0.0)
    scale = bracket_decay_scale(q_hat_radial, peak / 2.0)
    worst = 0.0
    radii = np.sqrt(np.sum(pts * pts, axis=1))
    direct = spec.family.profile(radii, d)
    for rho, q_val in zip(radii, direct):
        if d == 1:
            inv = cos_transform(q_hat_radial, rho, scale) / np.pi
        else:
            inv = hankel0_transform(q_hat_radial, rho, scale) / (2.0 * np.pi)
        worst = max(worst, abs(q_val - inv))
    return worst
