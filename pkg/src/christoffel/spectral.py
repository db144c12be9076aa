"""Population spectral quantities of a kernel.

Everything here concerns the Lebesgue-measure Christoffel profile

    D(lam) = (2 pi)^d / Integral[ q_hat(w) / (lam + q_hat(w)) dw ],

its extremal function f_lam (inverse transform of q_hat/(q_hat+lam),
normalized to 1 at the origin), and the small-lam asymptotics

    D(lam) ~ lam^beta / q0,        beta = d / (2 s gamma),

valid for kernels with polynomial spectral decay.  The constant q0 has
a closed form for the Matern family; it is always cross-validated
against the quadrature limit lam^beta / D(lam) at small lam, and the
quadrature value wins if they disagree beyond 1%.

The two population predictors derived from these quantities are

    inside the support:   C(z) ~ p(z) * D(lam / p(z))
    and asymptotically    C(z) ~ lam^beta * p(z)^(1-beta) / q0,

while outside the support C(z) is O(sqrt(lam) * D(sqrt(lam))), and
O(lam) for kernels whose spectral density is bounded below by
c/(1+||w||^a), which holds for every Matern kernel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import gamma as gamma_fn

from .kernels import KernelSpec, Matern
from .quadrature import bracket_decay_scale, cos_transform, radial_integral, hankel0_transform

_CROSS_CHECK_LAMBDA = 1e-8
_CROSS_CHECK_TOL = 0.01


@dataclass(frozen=True)
class SpectralProfile:
    """Spectral asymptotics of a kernel in a fixed dimension.

    ``s``, ``gamma``, ``beta`` and ``q0`` are None for kernels without
    polynomial spectral decay (the Gaussian family); D(lam), f_lam and
    the tail diagnostic remain available for those.
    """

    kernel: KernelSpec
    s: Optional[float]
    gamma: Optional[float]
    beta: Optional[float]
    q0: Optional[float]
    q0_closed_form: Optional[float]
    q0_quadrature_limit: Optional[float]
    rtol: float = 1e-10

    @property
    def dimension(self) -> int:
        return self.kernel.dimension

    @classmethod
    def from_kernel(cls, kernel: KernelSpec, rtol: float = 1e-10) -> "SpectralProfile":
        exps = kernel.sobolev_exponents()
        if exps is None:
            return cls(kernel, None, None, None, None, None, None, rtol)
        s, g = exps
        d = kernel.dimension
        beta = d / (2.0 * s * g)
        base = cls(kernel, s, g, beta, None, None, None, rtol)
        closed = _q0_reference(kernel)
        limit = _CROSS_CHECK_LAMBDA**beta / compute_D(base, _CROSS_CHECK_LAMBDA)
        gap = abs(closed - limit) / limit
        if gap > _CROSS_CHECK_TOL:
            warnings.warn(
                f"q0 closed form {closed:g} disagrees with quadrature limit "
                f"{limit:g} by {gap:.1%}; using the quadrature value",
                RuntimeWarning,
                stacklevel=2,
            )
            authoritative = limit
        else:
            authoritative = closed
        return cls(kernel, s, g, beta, authoritative, closed, limit, rtol)


def matern_q0_closed_form(nu: float, length: float, d: int) -> float:
    """Leading Christoffel constant for the Matern family.

    Spherical-coordinate reduction of the defining integral
    (2 pi)^-d * Integral[ dw / (1 + Q(w)^gamma) ] with the Matern
    homogeneous spectral part Q(w) = ||w||^2 / c^(1/gamma):

        q0 = c^(d/(2 nu + d))
             /(2^(d-1) pi^(d/2) Gamma(d/2))
             * pi / ((2 nu + d) sin(d pi / (2 nu + d))).

    In dimension 1 this collapses to
    c^(1/(2 nu + 1)) / ((2 nu + 1) sin(pi/(2 nu + 1))).
    """
    c, _, _ = Matern(nu, length).spectral_params(d)
    tg = 2.0 * nu + d
    return (
        c ** (d / tg)
        / (2.0 ** (d - 1) * np.pi ** (d / 2.0) * gamma_fn(d / 2.0))
        * np.pi
        / (tg * math.sin(d * np.pi / tg))
    )


def _q0_reference(kernel: KernelSpec) -> float:
    """q0 from the limiting integral: closed form for Matern, quadrature else."""
    d = kernel.dimension
    fam = kernel.family
    if isinstance(fam, Matern):
        return matern_q0_closed_form(fam.nu, fam.length, d)
    s, g = kernel.sobolev_exponents()
    # tail coefficient a with q_hat(r) ~ (a r^(2s))^(-gamma) at infinity
    q_hat = lambda r: float(fam.spectral(np.atleast_1d(r), d)[0])
    scale = bracket_decay_scale(q_hat, q_hat(0.0) / 2.0)
    r_far = 1e4 * max(scale, 1.0)
    a_coef = q_hat(r_far) ** (-1.0 / g) / r_far ** (2.0 * s)
    # limiting integrand 1 / (1 + (a r^(2s))^gamma), unit scale at a^(-1/(2s))
    unit = a_coef ** (-1.0 / (2.0 * s))
    integral = radial_integral(
        lambda r: r ** (d - 1) / (1.0 + (a_coef * r ** (2.0 * s)) ** g),
        unit,
    )
    surf = 2.0 * np.pi ** (d / 2.0) / gamma_fn(d / 2.0)
    return surf * integral / (2.0 * np.pi) ** d


def compute_q0(profile: SpectralProfile) -> float:
    """Authoritative q0 (closed form when it matches quadrature)."""
    if profile.q0 is None:
        raise ValueError("q0 requires a kernel with polynomial spectral decay")
    return profile.q0


def _q_hat_scalar(kernel: KernelSpec):
    fam = kernel.family
    d = kernel.dimension
    return lambda r: float(fam.spectral(np.atleast_1d(r), d)[0])


@lru_cache(maxsize=4096)
def _compute_D_cached(profile: SpectralProfile, lam: float) -> float:
    d = profile.dimension
    q_hat = _q_hat_scalar(profile.kernel)
    peak = q_hat(0.0)
    if lam < peak:
        scale = bracket_decay_scale(q_hat, lam)
    else:
        scale = bracket_decay_scale(q_hat, peak / 2.0)
    integrand = lambda r: q_hat(r) / (lam + q_hat(r)) * r ** (d - 1)
    integral = radial_integral(integrand, scale, rtol=profile.rtol)
    surf = 2.0 * np.pi ** (d / 2.0) / gamma_fn(d / 2.0)
    return (2.0 * np.pi) ** d / (surf * integral)


def compute_D(profile: SpectralProfile, lam: float) -> float:
    """Lebesgue-measure Christoffel value D(lam) by radial quadrature."""
    lam = float(lam)
    if not (np.isfinite(lam) and lam > 0):
        raise ValueError(f"lambda must be positive, got {lam}")
    return _compute_D_cached(profile, lam)


def eval_f_lambda(profile: SpectralProfile, lam: float, x) -> float:
    """Extremal function of the D(lam) problem, normalized so f(0) = 1."""
    d = profile.dimension
    if d not in (1, 2):
        raise ValueError("eval_f_lambda supports d in {1, 2}")
    lam = float(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    if pt.shape != (d,) and not (d == 1 and pt.size == 1):
        raise ValueError(f"point has shape {pt.shape}, expected ({d},)")
    a = float(np.sqrt(np.sum(pt * pt)))
    return _f_lambda_radial(profile, lam, a, compute_D(profile, lam))


def _f_lambda_radial(profile: SpectralProfile, lam: float, a: float, d_val: float) -> float:
    d = profile.dimension
    q_hat = _q_hat_scalar(profile.kernel)
    w = lambda r: q_hat(r) / (lam + q_hat(r))
    peak = q_hat(0.0)
    scale = bracket_decay_scale(q_hat, min(lam, peak / 2.0))
    if d == 1:
        integral = cos_transform(w, a, scale)
        return d_val * integral / np.pi
    integral = hankel0_transform(w, a, scale)
    return d_val * integral / (2.0 * np.pi)


def tail_mass_ratio(profile: SpectralProfile, lam: float, epsilon: float) -> float:
    """Mass of f_lam^2 outside [-eps, eps], relative to lam * D(lam).

    A diagnostic for the localization of the extremal function
    (dimension 1 only).  Ratios decaying with lam support the spectral
    asymptotics; for the Gaussian kernel the ratio is expected to stall.
    """
    if profile.dimension != 1:
        raise ValueError("tail_mass_ratio is a d=1 diagnostic")
    lam = float(lam)
    epsilon = float(epsilon)
    if lam <= 0 or epsilon <= 0:
        raise ValueError("lambda and epsilon must be positive")
    d_val = compute_D(profile, lam)

    def f_sq(x):
        val = _f_lambda_radial(profile, lam, x, d_val)
        return val * val

    # composite Gauss-Legendre over doubling blocks: the inner cosine
    # transforms must not run inside an adaptive scipy quad (QUADPACK
    # weighted routines are not reentrant)
    nodes, weights = np.polynomial.legendre.leggauss(24)
    total = 0.0
    left = epsilon
    width = max(epsilon, 0.25)
    for _ in range(40):
        mid = left + 0.5 * width
        half = 0.5 * width
        piece = half * sum(
            wk * f_sq(mid + half * xk) for xk, wk in zip(nodes, weights)
        )
        total += piece
        left += width
        width *= 2.0
        if abs(piece) < 1e-6 * max(abs(total), 1e-300):
            break
    return 2.0 * total / (lam * d_val)


def default_epsilon(profile: SpectralProfile, lam: float) -> float:
    """Localization radius lam^l with l strictly inside the admissible range.

    l = 0.9 * (1 - beta) / (8 p) with p = ceil(s * gamma).
    """
    if profile.beta is None:
        raise ValueError("default_epsilon requires polynomial spectral decay")
    p = math.ceil(profile.s * profile.gamma)
    exponent = 0.9 * (1.0 - profile.beta) / (8.0 * p)
    return float(lam) ** exponent


def predict_inside(profile: SpectralProfile, lam: float, p_z: float) -> float:
    """Finite-lam predictor p(z) * D(lam / p(z)) for interior points."""
    if not (np.isfinite(p_z) and p_z > 0):
        raise ValueError(f"density value must be positive, got {p_z}")
    return p_z * compute_D(profile, lam / p_z)


def predict_asymptotic(profile: SpectralProfile, lam: float, p_z: float) -> float:
    """Leading-order predictor lam^beta * p(z)^(1-beta) / q0."""
    if not (np.isfinite(p_z) and p_z > 0):
        raise ValueError(f"density value must be positive, got {p_z}")
    if profile.beta is None or profile.q0 is None:
        raise ValueError("asymptotic predictor requires polynomial spectral decay")
    lam = float(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return lam**profile.beta * p_z ** (1.0 - profile.beta) / profile.q0


def predict_outside(profile: SpectralProfile, lam: float) -> tuple[float, float]:
    """Envelope scales for exterior points.

    Returns (sqrt(lam) * D(sqrt(lam)), lam); the second, smaller scale
    applies to kernels with polynomially lower-bounded spectral density.
    """
    lam = float(lam)
    if lam <= 0:
        raise ValueError("lambda must be positive")
    root = math.sqrt(lam)
    return root * compute_D(profile, root), lam
