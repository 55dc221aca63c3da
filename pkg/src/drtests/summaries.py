"""Per-subject summaries of rank curves.

Each subject's rank curve collapses to one score, either the average of the
order-statistic sufficient statistic over occasions or the plain average
rank. The score vectors are what the second-stage rank tests consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInputError
from .ranking import RankCurves

__all__ = [
    "SummaryKind",
    "SummaryScores",
    "sufficient_summary",
    "average_rank_summary",
]


class SummaryKind(str, Enum):
    SUFFICIENT = "sufficient"
    AVERAGE_RANK = "average_rank"


@dataclass(frozen=True)
class SummaryScores:
    """One score per subject plus the summary used to produce it.

    Sufficient scores lie in [-log(2n-1), log(2n-1)]; the endpoints are
    attained by a subject ranked first (or last) at every occasion.
    Average-rank scores lie in [1, n], and their grand mean is always
    exactly (n+1)/2 because every rank column sums to n(n+1)/2.
    """

    scores: np.ndarray
    kind: SummaryKind
    n: int
    n_points: int

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=float).ravel()
        if scores.shape != (self.n,):
            raise InvalidInputError(
                f"expected {self.n} scores, got {scores.size}"
            )
        if not np.all(np.isfinite(scores)):
            raise InvalidInputError("scores must be finite")
        kind = SummaryKind(self.kind)
        if kind is SummaryKind.SUFFICIENT:
            bound = math.log(2.0 * self.n - 1.0)
            if np.any(np.abs(scores) > bound):
                raise InvalidInputError(
                    f"sufficient scores must lie in [-{bound}, {bound}]"
                )
        else:
            if np.any(scores < 1.0) or np.any(scores > self.n):
                raise InvalidInputError("average-rank scores must lie in [1, n]")
        scores = scores.copy()
        scores.flags.writeable = False
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "kind", kind)


def sufficient_summary(ranks: RankCurves) -> SummaryScores:
    """Average the rank sufficient statistic over each subject's occasions.

    score_i = (1/S) * sum_k t(z_i(s_k)) with t the log-odds form from
    `orderstat.suff_stat`, applied elementwise to the rank matrix.
    """
    r = ranks.ranks
    n = ranks.n
    # vectorized suff_stat; numpy's pairwise-summed mean keeps long grids
    # from accumulating drift
    t = np.log(2.0 * r - 1.0) - np.log(2.0 * (n - r) + 1.0)
    # a subject at rank 1 or n on every occasion sits on the interval
    # endpoint; log/mean rounding can overshoot it by an ulp, so snap back
    bound = math.log(2.0 * n - 1.0)
    scores = np.clip(t.mean(axis=1), -bound, bound)
    return SummaryScores(
        scores=scores, kind=SummaryKind.SUFFICIENT, n=n, n_points=ranks.n_points
    )


def average_rank_summary(ranks: RankCurves) -> SummaryScores:
    """Average each subject's ranks over occasions."""
    scores = ranks.ranks.mean(axis=1)
    return SummaryScores(
        scores=scores,
        kind=SummaryKind.AVERAGE_RANK,
        n=ranks.n,
        n_points=ranks.n_points,
    )
