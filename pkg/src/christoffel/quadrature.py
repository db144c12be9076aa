"""Radial and oscillatory quadrature helpers.

All spectral quantities reduce to one-dimensional integrals of radial
profiles.  Three primitives cover every need:

* ``radial_integral``: integral over [0, inf) of a decaying radial
  integrand, split at a characteristic scale with the tail mapped onto
  a finite interval by the inversion r -> scale/t (exact, no tail model),
* ``cos_transform``: Fourier cosine integral over [0, inf), delegated to
  QUADPACK's QAWF routine (cycle summation with epsilon-algorithm
  extrapolation),
* ``hankel0_transform``: order-zero Hankel integral, summed over panels
  between Bessel zeros and accelerated with Wynn's epsilon algorithm.
"""

from __future__ import annotations

import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import j0, jn_zeros


class QuadratureError(RuntimeError):
    """Raised when an integral cannot be resolved within the node budget."""

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


def bracket_decay_scale(f, target: float, start: float = 1.0) -> float:
    """Smallest r with f(r) <= target, for f positive and decreasing.

    Expands a bracket geometrically and bisects; used to locate the
    plateau edge of spectral integrands.  Falls back to ``start`` when
    f never exceeds the target.
    """
    if f(start) <= target:
        hi = start
        lo = start / 4.0
        while lo > 1e-300 and f(lo) <= target:
            hi = lo
            lo /= 4.0
        if f(lo) <= target:  # f below target everywhere probed
            return start
    else:
        lo = start
        hi = start * 4.0
        while hi < 1e300 and f(hi) > target:
            lo = hi
            hi *= 4.0
        if f(hi) > target:
            raise QuadratureError("integrand does not decay to target", np.inf)
    for _ in range(200):
        mid = np.sqrt(lo * hi)
        if f(mid) > target:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-12:
            break
    return hi


def radial_integral(f, scale: float, rtol: float = 1e-10, limit: int = 200) -> float:
    """Integral of ``f`` over [0, inf) for integrands decaying past ``scale``.

    The head [0, scale] is integrated directly; the tail is integrated
    exactly through the substitution r = scale/t, t in (0, 1].
    """
    scale = max(float(scale), 1e-300)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        head, e1 = quad(f, 0.0, scale, epsabs=0.0, epsrel=rtol, limit=limit)

        def tail_integrand(t):
            r = scale / t
            return f(r) * r / t

        tail, e2 = quad(tail_integrand, 0.0, 1.0, epsabs=0.0, epsrel=rtol, limit=limit)
    total = head + tail
    err = e1 + e2
    if not np.isfinite(total):
        raise QuadratureError("radial integral diverged", np.inf)
    if abs(total) > 0 and err / abs(total) > max(100.0 * rtol, 1e-8):
        raise QuadratureError("radial integral did not converge", err / abs(total))
    return total


def cos_transform(f, omega: float, scale: float, epsabs: float = 1e-12) -> float:
    """Integral of f(r)*cos(omega*r) over [0, inf) for decaying f.

    QUADPACK's Fourier routine (cycle summation plus epsilon-algorithm
    extrapolation) is tried first; its own error estimate decides
    whether the result is trusted.  At isolated frequencies the cycle
    extrapolation diverges, in which case an explicit half-period panel
    summation accelerated with Wynn's epsilon takes over.

    ``scale`` is a characteristic decay scale of f, used when omega == 0
    where the integral is non-oscillatory.
    """
    if omega == 0.0:
        return radial_integral(f, scale)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(
            f,
            0.0,
            np.inf,
            weight="cos",
            wvar=omega,
            epsabs=epsabs,
            limit=400,
            limlst=200,
        )
    if np.isfinite(val) and err <= max(1e3 * epsabs, 1e-2 * abs(val), 1e-9):
        return val
    return _cos_panels(f, omega)


def _cos_panels(f, omega: float, rtol: float = 1e-10, max_panels: int = 400) -> float:
    """Half-period panel summation of f(r)*cos(omega*r), Wynn-accelerated."""
    half = np.pi / omega

    def g(r):
        return f(r) * np.cos(omega * r)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        total, _ = quad(g, 0.0, 0.5 * half, epsabs=0.0, epsrel=rtol, limit=100)
        partial = [total]
        small_pieces = 0
        for k in range(max_panels):
            lo = (k + 0.5) * half
            piece, _ = quad(g, lo, lo + half, epsabs=0.0, epsrel=rtol, limit=60)
            total += piece
            partial.append(total)
            small_pieces = small_pieces + 1 if abs(piece) < rtol * max(abs(total), 1e-300) else 0
            if small_pieces >= 2:
                return total
            if len(partial) >= 10 and len(partial) % 2 == 0:
                est_prev = wynn_epsilon(np.array(partial[:-2]))
                est = wynn_epsilon(np.array(partial))
                scale_ref = max(abs(est), np.max(np.abs(partial)) * 1e-14, 1e-300)
                if abs(est - est_prev) <= rtol * scale_ref:
                    return est
    est = wynn_epsilon(np.array(partial))
    est_prev = wynn_epsilon(np.array(partial[:-2]))
    achieved = abs(est - est_prev) / max(abs(est), 1e-300)
    if achieved > 1e-5:
        raise QuadratureError(
            f"cosine transform did not converge at omega={omega}", achieved
        )
    return est


_J0_ZEROS_CACHE: dict[int, np.ndarray] = {}


def _j0_zeros(count: int) -> np.ndarray:
    if count not in _J0_ZEROS_CACHE:
        _J0_ZEROS_CACHE[count] = jn_zeros(0, count)
    return _J0_ZEROS_CACHE[count]


def wynn_epsilon(partial_sums: np.ndarray) -> float:
    """Limit estimate for a sequence of partial sums (Wynn's epsilon).

    Even columns of the epsilon table approximate the limit; odd columns
    are auxiliary.  A vanishing forward difference means the sequence
    already converged, in which case that value is returned directly.
    """
    s = np.asarray(partial_sums, dtype=float)
    n = s.size
    if n == 1:
        return float(s[0])
    older = np.zeros(n + 1)  # epsilon_{-1}
    prev = s.copy()  # epsilon_0
    best = float(s[-1])
    scale = max(np.max(np.abs(s)), 1e-300)
    for k in range(1, n):
        cur = np.empty(n - k)
        for i in range(n - k):
            diff = prev[i + 1] - prev[i]
            if abs(diff) < 1e-15 * scale:
                return float(prev[i + 1])
            cur[i] = older[i + 1] + 1.0 / diff
        older = prev
        prev = cur
        if k % 2 == 0:
            best = float(cur[-1])
    return best


def hankel0_transform(
    f, a: float, scale: float, rtol: float = 1e-9, max_panels: int = 120
) -> float:
    """Integral of f(r)*J0(a*r)*r over [0, inf) for decaying f."""
    if a == 0.0:
        return radial_integral(lambda r: f(r) * r, scale)
    zeros = _j0_zeros(max_panels + 1) / a

    def g(r):
        return f(r) * j0(a * r) * r

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        total, _ = quad(g, 0.0, zeros[0], epsabs=0.0, epsrel=rtol, limit=100)
        partial = [total]
        small_pieces = 0
        for k in range(max_panels):
            piece, _ = quad(
                g, zeros[k], zeros[k + 1], epsabs=0.0, epsrel=rtol, limit=60
            )
            total += piece
            partial.append(total)
            # fast-decaying integrands converge without acceleration
            small_pieces = small_pieces + 1 if abs(piece) < rtol * max(abs(total), 1e-300) else 0
            if small_pieces >= 2:
                return total
            if len(partial) >= 8:
                est_prev = wynn_epsilon(np.array(partial[:-1]))
                est = wynn_epsilon(np.array(partial))
                ref = max(abs(est), 1e-300)
                if abs(est - est_prev) / ref < rtol:
                    return est
    est = wynn_epsilon(np.array(partial))
    est_prev = wynn_epsilon(np.array(partial[:-1]))
    achieved = abs(est - est_prev) / max(abs(est), 1e-300)
    if achieved > 1e-5:
        raise QuadratureError("Hankel transform did not converge", achieved)
    return est
