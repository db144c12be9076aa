"""Backend dispatch for the numerical hot loops.

Gram assembly and Matern kernel evaluation dominate runtime: both reduce
to pairwise distances plus a modified-Bessel radial profile applied to
an O(n^2) array.  Two interchangeable implementations are provided:

* ``numba``: scalar loops compiled with ``@njit`` (self-contained Bessel
  evaluation, parallel over entries),
* ``numpy``: vectorized numpy with scipy's cephes/amos Bessel routines.

The active backend is chosen once at import time from the environment
variable ``CHRISTOFFEL_BACKEND`` (``"auto"``, ``"numba"`` or ``"numpy"``,
default ``"auto"``).  ``auto`` means numba when importable, numpy
otherwise.  Both implementations remain importable side by side so they
can be cross-checked and benchmarked (see ``benchmarks/``).
"""

from __future__ import annotations

import os

_ENV_VAR = "CHRISTOFFEL_BACKEND"

_requested = os.environ.get(_ENV_VAR, "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"{_ENV_VAR} must be 'auto', 'numba' or 'numpy', got {_requested!r}"
    )

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

if _requested == "numba" and not HAS_NUMBA:
    raise ImportError(f"{_ENV_VAR}=numba requested but numba is not installed")

if _requested == "numpy":
    _active = "numpy"
elif _requested == "numba":
    _active = "numba"
else:
    _active = "numba" if HAS_NUMBA else "numpy"

from . import _impl_numpy

if _active == "numba":
    from . import _impl_numba as _impl
else:
    _impl = _impl_numpy


def active_backend() -> str:
    """Name of the backend selected at import time."""
    return _active


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if HAS_NUMBA else ("numpy",)


def kv_array(nu, x):
    """Modified Bessel function of the second kind, elementwise in ``x``."""
    return _impl.kv_array(nu, x)


def matern_profile(r, nu, ell):
    """Matern radial profile on an array of distances, with value 1 at r=0."""
    return _impl.matern_profile(r, nu, ell)


def pairwise_dists(x, y):
    """Euclidean distance matrix between rows of ``x`` (n,d) and ``y`` (m,d)."""
    return _impl.pairwise_dists(x, y)
