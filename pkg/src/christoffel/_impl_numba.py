"""Numba-compiled implementations of the hot loops.

The Bessel K evaluation integrates exp(-x*cosh t)*cosh(nu*t) over t >= 0
with the trapezoid rule.  The integrand is positive and analytic in a
strip, so the error decays exponentially in 1/h; the step shrinks like
1/sqrt(x) to resolve the peak that forms at t=0 for large arguments.
This gives better than 12 significant digits uniformly over
nu in (0, 10], x in [1e-6, 50] (see tests) and underflows gracefully
to 0 for x beyond the range of exp.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange

_BASE_STEP = 0.15
_TRUNCATION = 1e-18


@njit(cache=True)
def kv_scalar(nu, x):
    """K_nu(x) for nu >= 0, x > 0 by trapezoid on the cosh integral."""
    if x <= 0.0:
        return np.nan
    if nu < 0.0:
        nu = -nu  # K is even in its order
    h = _BASE_STEP / max(1.0, math.sqrt(x))
    # exp(-x*cosh t) = exp(-x) * exp(-x*(cosh t - 1)); the factored form
    # keeps the summation in a sane range until exp(-x) itself underflows.
    # cosh(k h) and cosh(nu k h) advance by three-term recurrences, so the
    # inner loop costs a single exp per node.
    two_ch = 2.0 * math.cosh(h)
    two_cn = 2.0 * math.cosh(nu * h)
    c_prev, c_cur = 1.0, 0.5 * two_ch
    n_prev, n_cur = 1.0, 0.5 * two_cn
    total = 0.5
    k = 1
    while k < 20000:
        term = math.exp(-x * (c_cur - 1.0)) * n_cur
        total += term
        if term < _TRUNCATION * total and (k * h) * (1.0 + nu) > 1.0:
            break
        c_prev, c_cur = c_cur, two_ch * c_cur - c_prev
        n_prev, n_cur = n_cur, two_cn * n_cur - n_prev
        k += 1
    return total * h * math.exp(-x)


@njit(cache=True, parallel=True)
def kv_array(nu, x):
    x = np.asarray(x)
    flat = x.ravel()
    out = np.empty(flat.shape[0])
    for i in prange(flat.shape[0]):
        out[i] = kv_scalar(nu, flat[i])
    return out.reshape(x.shape)


@njit(cache=True, parallel=True)
def matern_profile(r, nu, ell):
    r = np.asarray(r)
    flat = r.ravel()
    out = np.empty(flat.shape[0])
    scale = math.sqrt(2.0 * nu) / ell
    pref = 2.0 ** (1.0 - nu) / math.gamma(nu)
    for i in prange(flat.shape[0]):
        z = scale * flat[i]
        if z <= 0.0:
            out[i] = 1.0
        else:
            out[i] = pref * z**nu * kv_scalar(nu, z)
    return out.reshape(r.shape)


@njit(cache=True, parallel=True)
def pairwise_dists(x, y):
    n, d = x.shape
    m = y.shape[0]
    out = np.empty((n, m))
    for i in prange(n):
        for j in range(m):
            acc = 0.0
            for k in range(d):
                diff = x[i, k] - y[j, k]
                acc += diff * diff
            out[i, j] = math.sqrt(acc)
    return out
