"""Functional-principal-components presmoothing.

Curves are centered by the grand mean curve (groups ignored), decomposed by
SVD, and reconstructed from the smallest number of leading components whose
cumulative squared singular values reach the requested proportion of
variance. This truncated-SVD smoother stands in for heavier penalized
covariance smoothers; the downstream rank tests accept raw or smoothed
curves equally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .ranking import CurveSet

__all__ = ["FpcaResult", "fpca_smooth"]


@dataclass(frozen=True)
class FpcaResult:
    """Smoothed curves plus what the truncation kept.

    pve_achieved is the cumulative variance ratio of the kept components;
    it is the smallest ratio at or above the requested proportion. For
    centered data with zero total variance there is nothing to truncate and
    the input is returned unchanged with a single nominal component.
    """

    smoothed: np.ndarray
    mean_curve: np.ndarray
    components_kept: int
    pve_achieved: float

    def __post_init__(self) -> None:
        smoothed = np.asarray(self.smoothed, dtype=float)
        mean_curve = np.asarray(self.mean_curve, dtype=float).ravel()
        if self.components_kept < 1:
            raise InvalidInputError("components_kept must be >= 1")
        if not np.all(np.isfinite(smoothed)):
            raise InvalidInputError("smoothed matrix must be finite")
        if not 0.0 < self.pve_achieved <= 1.0:
            raise InvalidInputError("pve_achieved must lie in (0, 1]")
        for name, arr in (("smoothed", smoothed), ("mean_curve", mean_curve)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def fpca_smooth(curves: CurveSet, pve: float) -> FpcaResult:
    """Reconstruct curves from the fewest components reaching `pve`.

    pve must lie in (0, 1]. pve=1.0 returns the input exactly. The
    reconstruction discards exactly the trailing (1 - pve_achieved) share
    of centered variance, so the squared Frobenius error of the smoothed
    matrix equals that share of the total.
    """
    pve = float(pve)
    if not 0.0 < pve <= 1.0:
        raise InvalidInputError(f"pve must lie in (0, 1], got {pve}")
    x = np.asarray(curves.values, dtype=float)
    if x.shape[0] < 2:
        raise InvalidInputError("need at least 2 curves to smooth")

    mean_curve = x.mean(axis=0)
    centered = x - mean_curve
    total_var = float(np.sum(centered**2))
    if total_var == 0.0:
        return FpcaResult(
            smoothed=x.copy(),
            mean_curve=mean_curve,
            components_kept=1,
            pve_achieved=1.0,
        )

    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    ratio = np.cumsum(s**2)
    ratio /= ratio[-1]
    if pve == 1.0:
        # keep everything that carries variance; return the input untouched
        kept = int(np.count_nonzero(s > 0.0))
        return FpcaResult(
            smoothed=x.copy(),
            mean_curve=mean_curve,
            components_kept=max(kept, 1),
            pve_achieved=1.0,
        )
    kept = int(np.searchsorted(ratio, pve, side="left")) + 1
    kept = min(kept, s.size)
    smoothed = mean_curve + (u[:, :kept] * s[:kept]) @ vt[:kept]
    return FpcaResult(
        smoothed=smoothed,
        mean_curve=mean_curve,
        components_kept=kept,
        pve_achieved=float(ratio[kept - 1]),
    )
