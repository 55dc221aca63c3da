"""Curve containers and per-occasion ranking.

The first stage of a doubly ranked test assigns, at every measurement
occasion, ranks across subjects while ignoring group membership. Ties get
mid-ranks (the average of the integer ranks they span), so ranks are stored
as floats.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import InvalidInputError

__all__ = ["CurveSet", "RankCurves", "rank_vector", "rank_curves"]


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class CurveSet:
    """A sample of n curves observed on a shared grid of S occasions.

    values
        n x S matrix; row i is subject i's curve.
    grid
        strictly increasing measurement locations, length S.
    groups
        integer label per subject; labels must be exactly 1..G with every
        label present and G >= 2.
    """

    values: np.ndarray
    grid: np.ndarray
    groups: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        grid = np.asarray(self.grid, dtype=float).ravel()
        groups = np.asarray(self.groups).ravel()

        if values.ndim != 2:
            raise InvalidInputError("values must be a 2-d matrix")
        n, s = values.shape
        if n < 2:
            raise InvalidInputError(f"need at least 2 subjects, got {n}")
        if s < 1:
            raise InvalidInputError("need at least 1 measurement occasion")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("curve values must all be finite")
        if grid.shape != (s,):
            raise InvalidInputError(
                f"grid length {grid.size} does not match {s} value columns"
            )
        if not np.all(np.isfinite(grid)):
            raise InvalidInputError("grid values must be finite")
        if s > 1 and not np.all(np.diff(grid) > 0):
            raise InvalidInputError("grid must be strictly increasing")
        if groups.shape != (n,):
            raise InvalidInputError(
                f"got {groups.size} group labels for {n} subjects"
            )
        if not np.issubdtype(groups.dtype, np.integer):
            as_int = groups.astype(int)
            if not np.array_equal(as_int, groups):
                raise InvalidInputError("group labels must be integers")
            groups = as_int
        n_groups = int(groups.max()) if groups.size else 0
        present = np.unique(groups)
        if n_groups < 2 or not np.array_equal(present, np.arange(1, n_groups + 1)):
            raise InvalidInputError(
                "group labels must be exactly 1..G with G >= 2 and every "
                f"label present; saw {present.tolist()}"
            )

        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "grid", _readonly(grid))
        groups = groups.astype(int, copy=True)
        groups.flags.writeable = False
        object.__setattr__(self, "groups", groups)

    @property
    def n_subjects(self) -> int:
        return self.values.shape[0]

    @property
    def n_points(self) -> int:
        return self.values.shape[1]

    @property
    def n_groups(self) -> int:
        return int(self.groups.max())

    @property
    def group_sizes(self) -> tuple[int, ...]:
        return tuple(
            int(np.sum(self.groups == g)) for g in range(1, self.n_groups + 1)
        )


@dataclass(frozen=True)
class RankCurves:
    """Per-occasion mid-ranks of a curve set: one rank curve per subject.

    Every column is a mid-rank assignment of {1..n}, so it sums to
    n(n+1)/2 and entries lie in [1, n].
    """

    ranks: np.ndarray
    n: int
    n_points: int

    def __post_init__(self) -> None:
        ranks = np.atleast_2d(np.asarray(self.ranks, dtype=float))
        if ranks.shape != (self.n, self.n_points):
            raise InvalidInputError(
                f"rank matrix shape {ranks.shape} does not match "
                f"({self.n}, {self.n_points})"
            )
        if not np.all(np.isfinite(ranks)):
            raise InvalidInputError("ranks must be finite")
        if np.any(ranks < 1.0) or np.any(ranks > self.n):
            raise InvalidInputError("ranks must lie in [1, n]")
        target = self.n * (self.n + 1) / 2.0
        sums = ranks.sum(axis=0)
        if not np.allclose(sums, target, rtol=0.0, atol=1e-8 * max(1.0, target)):
            raise InvalidInputError(
                "each rank column must sum to n(n+1)/2; "
                f"saw column sums {sums.tolist()}"
            )
        object.__setattr__(self, "ranks", _readonly(ranks))


def rank_vector(values: np.ndarray) -> np.ndarray:
    """Mid-ranks of a 1-d sample; ties share the average of their ranks.

    The output always sums to n(n+1)/2.
    """
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size < 1:
        raise InvalidInputError("cannot rank an empty vector")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("cannot rank non-finite values")
    return rankdata(arr, method="average")


def rank_curves(curves: CurveSet) -> RankCurves:
    """Rank subjects within each occasion, ignoring group labels."""
    ranks = rankdata(curves.values, method="average", axis=0)
    return RankCurves(ranks=ranks, n=curves.n_subjects, n_points=curves.n_points)
