"""Modified Bessel function of the second kind, K_nu.

Thin, validated wrapper over the active backend (see ``backends``).
Accuracy contract: at least 10 significant digits for nu in (0, 10] and
x in [1e-6, 50]; exercised against closed forms, an independent
series/asymptotic oracle and scipy in the test suite.
"""

from __future__ import annotations

import numpy as np

from . import backends


def bessel_k(nu: float, x):
    """Evaluate K_nu(x) for x > 0.

    Parameters
    ----------
    nu : float
        Order.  K is even in its order, so the sign of ``nu`` is
        irrelevant; accuracy is guaranteed for |nu| <= 10.
    x : float or array_like
        Strictly positive argument(s).

    Returns
    -------
    float or ndarray
        K_nu(x).  Underflows gracefully to 0.0 for very large x.

    Raises
    ------
    ValueError
        If any x <= 0 or is not finite.
    OverflowError
        If the result is too large to represent (tiny x with large nu).
    """
    scalar = np.isscalar(x) or (isinstance(x, np.ndarray) and x.ndim == 0)
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(arr)):
        raise ValueError("bessel_k: argument must be finite")
    if np.any(arr <= 0.0):
        bad = float(arr[arr <= 0.0][0])
        raise ValueError(f"bessel_k: argument must be positive, got x={bad}")
    out = backends.kv_array(abs(float(nu)), arr)
    if not np.all(np.isfinite(out)):
        bad = float(arr[~np.isfinite(out)][0])
        raise OverflowError(f"bessel_k overflow at nu={nu}, x={bad}")
    return float(out[0]) if scalar else out
