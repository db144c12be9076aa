"""Pure numpy/scipy implementations of the hot loops."""

from __future__ import annotations

import numpy as np
from scipy.special import gamma as _gamma
from scipy.special import kv as _scipy_kv


def kv_array(nu, x):
    x = np.asarray(x, dtype=float)
    return _scipy_kv(nu, x)


def matern_profile(r, nu, ell):
    r = np.asarray(r, dtype=float)
    z = (np.sqrt(2.0 * nu) / ell) * r
    out = np.ones_like(z)
    pos = z > 0
    zp = z[pos]
    out[pos] = (2.0 ** (1.0 - nu) / _gamma(nu)) * zp**nu * _scipy_kv(nu, zp)
    return out


def pairwise_dists(x, y):
    # exact differences, not the |x|^2 + |y|^2 - 2xy expansion: coincident
    # points must give a distance of exactly zero
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    sq = np.zeros((x.shape[0], y.shape[0]))
    for axis in range(x.shape[1]):
        diff = x[:, axis, None] - y[None, :, axis]
        sq += diff * diff
    return np.sqrt(sq)
