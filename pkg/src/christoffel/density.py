"""Inverting the asymptotics: density estimates and support labels.

The asymptotic predictor C ~ lam^beta p^(1-beta) / q0 is an invertible
function of p, giving the plug-in density estimate

    p_hat = (C * q0 / lam^beta)^(1/(1-beta)),

and, read the other way, the rate diagnostic

    (C * q0 / p^(1-beta))^(1/beta),

which should track lam itself at interior points.  Support labeling
compares the observed Christoffel value against the exterior O(lam)
envelope and the interior asymptotic scale at a configured floor
density; values between the two envelopes stay unlabeled, as nothing
is claimed on the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .gram import GramSystem, christoffel_at_points
from .spectral import SpectralProfile, predict_asymptotic

INSIDE = "inside"
OUTSIDE = "outside"
BOUNDARY = "boundary_uncertain"

DEFAULT_MARGIN = 10.0
DEFAULT_P_MIN = 1e-2


@dataclass(frozen=True)
class ChristoffelEstimate:
    """Per-query record: Christoffel value, leverage, label, density."""

    z: np.ndarray
    c_value: float
    leverage: float
    support_label: str
    p_hat: Optional[float] = None

    def __post_init__(self):
        if self.c_value <= 0:
            raise ValueError("Christoffel value must be positive")
        if (self.p_hat is not None) != (self.support_label == INSIDE):
            raise ValueError("p_hat must be present exactly for inside-labeled points")


def estimate_density(profile: SpectralProfile, lam: float, c_value: float) -> float:
    """Algebraic inverse of the asymptotic predictor at this c_value.

    Meaningful only in the interior regime; labeling is the caller's
    job (see ``support_indicator``).
    """
    if c_value <= 0:
        raise ValueError(f"Christoffel value must be positive, got {c_value}")
    if profile.beta is None or profile.q0 is None:
        raise ValueError("density estimation requires polynomial spectral decay")
    beta = profile.beta
    return float((c_value * profile.q0 / float(lam) ** beta) ** (1.0 / (1.0 - beta)))


def rate_diagnostic(
    profile: SpectralProfile, lam: float, c_value: float, p_true: float
) -> float:
    """(C q0 / p^(1-beta))^(1/beta); tracks lam at interior points."""
    if p_true <= 0:
        raise ValueError(f"true density must be positive, got {p_true}")
    if c_value <= 0:
        raise ValueError(f"Christoffel value must be positive, got {c_value}")
    if profile.beta is None or profile.q0 is None:
        raise ValueError("rate diagnostic requires polynomial spectral decay")
    beta = profile.beta
    return float(
        (c_value * profile.q0 / p_true ** (1.0 - beta)) ** (1.0 / beta)
    )


def support_indicator(
    profile: SpectralProfile,
    lam: float,
    c_value: float,
    margin: float = DEFAULT_MARGIN,
    p_min: float = DEFAULT_P_MIN,
) -> str:
    """Three-way support label from the two asymptotic envelopes.

    ``outside`` when c_value is within ``margin`` of the exterior O(lam)
    scale; ``inside`` when it reaches the interior scale at the floor
    density ``p_min`` (up to 1/margin); ``boundary_uncertain`` between.
    """
    if margin <= 1:
        raise ValueError(f"margin must exceed 1, got {margin}")
    if c_value <= 0:
        raise ValueError("Christoffel value must be positive")
    lam = float(lam)
    if c_value < margin * lam:
        return OUTSIDE
    if profile.beta is not None and c_value > predict_asymptotic(profile, lam, p_min) / margin:
        return INSIDE
    return BOUNDARY


def evaluate_field(
    sys: GramSystem,
    profile: SpectralProfile,
    queries,
    margin: float = DEFAULT_MARGIN,
    p_min: float = DEFAULT_P_MIN,
) -> List[ChristoffelEstimate]:
    """Batch Christoffel evaluation with labels and density estimates.

    Output order matches input order.  Density estimates are attached
    only to inside-labeled points; exterior points report leverage only.
    """
    z = np.atleast_2d(np.asarray(queries, dtype=float))
    if z.shape[0] == 0:
        return []
    c_values = christoffel_at_points(sys, z)
    out: List[ChristoffelEstimate] = []
    for row, c in zip(z, c_values):
        label = support_indicator(profile, sys.lam, float(c), margin, p_min)
        p_hat = (
            estimate_density(profile, sys.lam, float(c)) if label == INSIDE else None
        )
        out.append(
            ChristoffelEstimate(
                z=row.copy(),
                c_value=float(c),
                leverage=1.0 / float(c),
                support_label=label,
                p_hat=p_hat,
            )
        )
    return out
