"""Shared construction helpers for the test suite."""

import numpy as np

from drtests import CurveSet, RankCurves


def make_curves(values, groups=None, grid=None):
    values = np.asarray(values, dtype=float)
    n, s = values.shape
    if groups is None:
        groups = [1] * (n // 2) + [2] * (n - n // 2)
    if grid is None:
        grid = np.arange(1, s + 1) / s
    return CurveSet(values=values, grid=grid, groups=groups)


def ranks_from(matrix):
    matrix = np.asarray(matrix, dtype=float)
    return RankCurves(ranks=matrix, n=matrix.shape[0], n_points=matrix.shape[1])
