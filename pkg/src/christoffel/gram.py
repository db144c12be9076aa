"""Assembled Gram systems and Christoffel / leverage queries.

For a kernel k, weights eta and regularization lam > 0, the empirical
regularized Christoffel function has the closed form

    C(z) = lam / ( k(z,z) - v_z' diag(eta) (lam I + K diag(eta))^{-1} v_z ),

with v_z = (k(z, x_j))_j, which at a support point x_i reduces to the
classical expression (K_i' (K diag(eta) K + lam K)^{-1} K_i)^{-1}.  The
printed form inverts a matrix that is singular whenever K is rank
deficient, so the implementation never forms it: it factors the
symmetrized, always well-conditioned matrix

    A = lam I + diag(sqrt(eta)) K diag(sqrt(eta))

once per lam (Cholesky) and evaluates every query through it, using
diag(eta) (lam I + K diag(eta))^{-1} = S A^{-1} S with S = diag(sqrt(eta)).
The equivalence of the two expressions is enforced by tests against a
direct solve of the printed form.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .kernels import KernelSpec, cross_matrix, gram_matrix
from .measure import WeightedSample

# λ below this multiple of q(0)*n is numerically meaningless: the query
# formulas lose all significant digits to cancellation
LAMBDA_FLOOR = 1e-12

_JITTER_START = 1e-12
_JITTER_MAX = 1e-8
_PROBE_RESIDUAL_TOL = 1e-8


class FactorizationError(RuntimeError):
    """Raised when the regularized system cannot be factored."""

    def __init__(self, message: str, jitter: float):
        super().__init__(f"{message} (final jitter {jitter:.3e})")
        self.jitter = jitter


@dataclass(frozen=True, eq=False)
class GramSystem:
    """Immutable factored system; safe for concurrent queries."""

    kernel: KernelSpec
    sample: WeightedSample
    lam: float
    gram: np.ndarray
    jitter: float
    factor_residual: float
    _sqrt_weights: np.ndarray
    _chol: tuple

    @property
    def n(self) -> int:
        return self.sample.n

    def q_zero(self) -> float:
        """Effective k(z, z), including any stabilizing jitter."""
        return self.kernel.q_zero() + self.jitter


def _validate_lambda(lam: float, q0: float, n: int) -> float:
    lam = float(lam)
    if not np.isfinite(lam) or lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    floor = LAMBDA_FLOOR * q0 * n
    if lam < floor:
        raise ValueError(
            f"lambda={lam:g} is below the numerical floor {floor:g} "
            f"(1e-12 * q(0) * n); results would be meaningless"
        )
    return lam


def _factor(gram: np.ndarray, sqrt_w: np.ndarray, lam: float, q0: float):
    """Cholesky of lam*I + S K S with escalating diagonal jitter."""
    n = gram.shape[0]
    jitter = 0.0
    attempt = gram
    while True:
        a = (sqrt_w[:, None] * attempt) * sqrt_w[None, :]
        a[np.diag_indices_from(a)] += lam
        try:
            chol = cho_factor(a, lower=True, check_finite=False)
        except LinAlgError:
            chol = None
        if chol is not None:
            probe = np.full(n, 1.0 / np.sqrt(n))
            lower = np.tril(chol[0])
            residual = np.linalg.norm(lower @ (lower.T @ probe) - a @ probe)
            residual /= max(np.linalg.norm(a @ probe), 1e-300)
            if residual <= _PROBE_RESIDUAL_TOL:
                return attempt, jitter, chol, float(residual)
        jitter = _JITTER_START * q0 if jitter == 0.0 else jitter * 10.0
        if jitter > _JITTER_MAX * q0 * (1.0 + 1e-9):
            raise FactorizationError(
                "factorization failed after maximum jitter escalation", jitter
            )
        attempt = gram.copy()
        attempt[np.diag_indices_from(attempt)] += jitter


def assemble(kernel: KernelSpec, sample: WeightedSample, lam: float) -> GramSystem:
    """Build the Gram matrix and factor the regularized system.

    Cost is O(n^2 d) for assembly plus O(n^3) for the factorization.
    """
    if kernel.dimension != sample.dimension:
        raise ValueError(
            f"kernel dimension {kernel.dimension} != sample dimension {sample.dimension}"
        )
    q0 = kernel.q_zero()
    lam = _validate_lambda(lam, q0, sample.n)
    gram = gram_matrix(kernel, sample.points)
    sqrt_w = np.sqrt(sample.weights)
    gram_j, jitter, chol, residual = _factor(gram, sqrt_w, lam, q0)
    return GramSystem(
        kernel=kernel,
        sample=sample,
        lam=lam,
        gram=gram_j,
        jitter=jitter,
        factor_residual=residual,
        _sqrt_weights=sqrt_w,
        _chol=chol,
    )


def refit_lambda(sys: GramSystem, lam_new: float) -> GramSystem:
    """Same Gram matrix, new regularization; only the factorization is redone."""
    q0 = sys.kernel.q_zero()
    lam = _validate_lambda(lam_new, q0, sys.n)
    base = sys.gram.copy()
    if sys.jitter:
        base[np.diag_indices_from(base)] -= sys.jitter
    gram_j, jitter, chol, residual = _factor(base, sys._sqrt_weights, lam, q0)
    return replace(
        sys,
        lam=lam,
        gram=gram_j,
        jitter=jitter,
        factor_residual=residual,
        _chol=chol,
    )


def _quadratic_terms(sys: GramSystem, columns: np.ndarray) -> np.ndarray:
    """(S v)' A^{-1} (S v) for each column v of ``columns``."""
    m = sys._sqrt_weights[:, None] * columns
    t = cho_solve(sys._chol, m, check_finite=False)
    return np.einsum("ij,ij->j", m, t)


def christoffel_at_support_all(sys: GramSystem) -> np.ndarray:
    """Christoffel values at every support point, O(n^3) total."""
    quad = _quadratic_terms(sys, sys.gram)
    denom = np.diag(sys.gram) - quad
    _check_denominator(denom, sys.lam)
    return sys.lam / denom


def christoffel_at_support(sys: GramSystem, i: int) -> float:
    """Christoffel value C(x_i) at the i-th support point."""
    if not 0 <= i < sys.n:
        raise IndexError(f"support index {i} out of range [0, {sys.n})")
    quad = _quadratic_terms(sys, sys.gram[:, [i]])[0]
    denom = sys.gram[i, i] - quad
    _check_denominator(np.array([denom]), sys.lam)
    return float(sys.lam / denom)


def christoffel_at_points(sys: GramSystem, queries) -> np.ndarray:
    """Christoffel values at arbitrary query points, shape (m,)."""
    z = np.atleast_2d(np.asarray(queries, dtype=float))
    if z.shape[1] != sys.sample.dimension:
        raise ValueError(
            f"query dimension {z.shape[1]} != sample dimension {sys.sample.dimension}"
        )
    if not np.all(np.isfinite(z)):
        raise ValueError("query points must be finite")
    v = cross_matrix(sys.kernel, sys.sample.points, z)  # n x m
    if sys.jitter:
        # the jittered kernel is k + jitter * [x == y]
        coincide = np.all(
            sys.sample.points[:, None, :] == z[None, :, :], axis=-1
        )
        v = v + sys.jitter * coincide
    quad = _quadratic_terms(sys, v)
    denom = sys.q_zero() - quad
    _check_denominator(denom, sys.lam)
    return sys.lam / denom


def christoffel_at_point(sys: GramSystem, z) -> float:
    return float(christoffel_at_points(sys, np.atleast_2d(np.asarray(z, dtype=float)))[0])


def leverage_score(sys: GramSystem, z) -> float:
    """Inverse of the regularized Christoffel value at z."""
    return 1.0 / christoffel_at_point(sys, z)


def leverage_scores_at_points(sys: GramSystem, queries) -> np.ndarray:
    return 1.0 / christoffel_at_points(sys, queries)


def _check_denominator(denom: np.ndarray, lam: float) -> None:
    if np.any(denom <= 0):
        raise ArithmeticError(
            "Christoffel denominator lost all significant digits; "
            f"increase lambda (lam={lam:g})"
        )
