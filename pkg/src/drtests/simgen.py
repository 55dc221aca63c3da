"""Synthetic grouped functional data.

Curves are sums of damped sinusoids with random coefficients (a truncated
basis expansion of a standard process on [0, 1]), optionally shifted in all
but the first group by a scaled mean shape and perturbed by white or AR(1)
measurement noise. Replicates draw from counter-based substreams, so any
replicate can be regenerated independently of the others and parallel runs
match serial ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from numpy.random import Generator, Philox
from scipy.signal import lfilter

from .errors import InvalidInputError
from .ranking import CurveSet

__all__ = [
    "CoeffDist",
    "MeanShape",
    "NoiseKind",
    "SimConfig",
    "eigen_curve",
    "mean_fn",
    "noise_vector",
    "replicate_stream",
    "generate_dataset",
]

_SEED_MASK = (1 << 128) - 1

# peak of s(1-s)^5 over [0,1], attained at s = 1/6; dividing by it makes
# the bump shape reach exactly xi at its mode
_BUMP_PEAK = (1.0 / 6.0) * (5.0 / 6.0) ** 5


class CoeffDist(str, Enum):
    GAUSSIAN = "gaussian"
    STUDENT_T2 = "t2"


class MeanShape(str, Enum):
    NONE = "none"
    LINEAR = "linear"
    PARABOLA = "parabola"
    BETA_BUMP = "beta-bump"


class NoiseKind(str, Enum):
    NONE = "none"
    WHITE = "white"
    AR1 = "ar1"


@dataclass(frozen=True)
class SimConfig:
    """One simulation cell.

    n_points is the grid size (locations j/n_points for j = 1..n_points),
    n_basis the truncation of the coefficient expansion, xi the scale of
    the mean shift applied to every group after the first, and rho the
    lag-one correlation when noise is AR(1). The seed plus a replicate
    index fully determine a dataset.
    """

    n_per_group: tuple[int, ...]
    n_points: int
    n_basis: int = 1000
    coeff_dist: CoeffDist = CoeffDist.GAUSSIAN
    mean_shape: MeanShape = MeanShape.NONE
    xi: float = 0.0
    noise: NoiseKind = NoiseKind.NONE
    rho: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        sizes = tuple(int(v) for v in self.n_per_group)
        if len(sizes) < 2:
            raise InvalidInputError("need at least 2 groups")
        if min(sizes) < 1:
            raise InvalidInputError("every group size must be >= 1")
        object.__setattr__(self, "n_per_group", sizes)
        if self.n_points < 1:
            raise InvalidInputError("n_points must be >= 1")
        if self.n_basis < 1:
            raise InvalidInputError("n_basis must be >= 1")
        object.__setattr__(self, "coeff_dist", CoeffDist(self.coeff_dist))
        object.__setattr__(self, "mean_shape", MeanShape(self.mean_shape))
        object.__setattr__(self, "noise", NoiseKind(self.noise))
        if not float(self.xi) >= 0.0:
            raise InvalidInputError(f"xi must be >= 0, got {self.xi}")
        object.__setattr__(self, "xi", float(self.xi))
        rho = float(self.rho)
        if not -1.0 < rho < 1.0:
            raise InvalidInputError(f"rho must lie in (-1, 1), got {rho}")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def n_subjects(self) -> int:
        return sum(self.n_per_group)


@lru_cache(maxsize=8)
def _basis_matrix(n_basis: int, n_points: int) -> np.ndarray:
    """Basis curves sqrt(2) sin[(k-0.5) pi s] / [(k-0.5) pi], k x S."""
    s = np.arange(1, n_points + 1) / n_points
    freq = (np.arange(1, n_basis + 1) - 0.5) * np.pi
    basis = (np.sqrt(2.0) / freq)[:, None] * np.sin(np.outer(freq, s))
    basis.flags.writeable = False
    return basis


def eigen_curve(coeffs: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Evaluate sum_k coeffs_k * sqrt(2) sin[(k-0.5) pi s] / [(k-0.5) pi].

    The accumulation over k is a single matrix product, which numpy sums
    pairwise, so long expansions do not drift. Every basis curve vanishes
    at s=0.
    """
    coeffs = np.asarray(coeffs, dtype=float).ravel()
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size and (grid.min() < 0.0 or grid.max() > 1.0):
        raise InvalidInputError("grid values must lie in [0, 1]")
    freq = (np.arange(1, coeffs.size + 1) - 0.5) * np.pi
    basis = (np.sqrt(2.0) / freq)[:, None] * np.sin(np.outer(freq, grid))
    return coeffs @ basis


def mean_fn(kind: MeanShape | str, s: np.ndarray, xi: float) -> np.ndarray:
    """Mean shift at locations s in [0, 1], scaled so its peak equals xi.

    linear: xi*s; parabola: xi*4s(1-s); beta-bump: xi*s(1-s)^5 normalized
    by its maximum, which sits at s = 1/6. Scalar input returns a scalar.
    """
    kind = MeanShape(kind)
    arr = np.asarray(s, dtype=float)
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise InvalidInputError("s must lie in [0, 1]")
    if kind is MeanShape.NONE:
        out = np.zeros_like(arr)
    elif kind is MeanShape.LINEAR:
        out = xi * arr
    elif kind is MeanShape.PARABOLA:
        out = xi * 4.0 * arr * (1.0 - arr)
    else:
        out = xi * arr * (1.0 - arr) ** 5 / _BUMP_PEAK
    return float(out) if np.isscalar(s) else out


def _noise_matrix(
    kind: NoiseKind, shape: tuple[int, int], rng: Generator, rho: float
) -> np.ndarray:
    if kind is NoiseKind.NONE:
        return np.zeros(shape)
    draws = rng.standard_normal(shape)
    if kind is NoiseKind.WHITE:
        return draws
    # stationary AR(1): e_1 = eta_1, e_t = rho e_{t-1} + sqrt(1-rho^2) eta_t,
    # run as an IIR filter along the occasion axis
    draws[:, 1:] *= np.sqrt(1.0 - rho**2)
    return lfilter([1.0], [1.0, -rho], draws, axis=1)


def noise_vector(
    kind: NoiseKind | str, n_points: int, rng: Generator, rho: float = 0.5
) -> np.ndarray:
    """One measurement-noise curve with unit marginal variance.

    White noise is iid standard normal; AR(1) has lag-h correlation rho^h
    via the stationary recursion. kind "none" returns zeros without
    consuming random numbers.
    """
    kind = NoiseKind(kind)
    if n_points < 1:
        raise InvalidInputError("n_points must be >= 1")
    if not -1.0 < rho < 1.0:
        raise InvalidInputError(f"rho must lie in (-1, 1), got {rho}")
    return _noise_matrix(kind, (1, n_points), rng, rho)[0]


def replicate_stream(seed: int, replicate: int) -> Generator:
    """Independent substream for one replicate of a seeded experiment.

    Counter-based: the stream depends only on (seed, replicate), never on
    how many replicates ran before, so serial and parallel execution see
    identical draws.
    """
    if replicate < 0:
        raise InvalidInputError("replicate index must be >= 0")
    return Generator(Philox(key=seed & _SEED_MASK, counter=replicate << 128))


def generate_dataset(config: SimConfig, replicate: int = 0) -> CurveSet:
    """Deterministically generate one grouped functional dataset.

    Group 1 curves are centered; groups 2..G receive the configured mean
    shift. Draw order is fixed (one coefficient block, then one noise
    block) as part of the determinism contract.
    """
    rng = replicate_stream(config.seed, replicate)
    n = config.n_subjects
    basis = _basis_matrix(config.n_basis, config.n_points)
    grid = np.arange(1, config.n_points + 1) / config.n_points

    if config.coeff_dist is CoeffDist.GAUSSIAN:
        coeffs = rng.standard_normal((n, config.n_basis))
    else:
        coeffs = rng.standard_t(2.0, size=(n, config.n_basis))
    values = coeffs @ basis
    values += _noise_matrix(config.noise, (n, config.n_points), rng, config.rho)

    labels = np.repeat(
        np.arange(1, len(config.n_per_group) + 1), config.n_per_group
    )
    if config.xi > 0.0 and config.mean_shape is not MeanShape.NONE:
        values[labels > 1] += mean_fn(config.mean_shape, grid, config.xi)
    return CurveSet(values=values, grid=grid, groups=labels)
