"""Monte Carlo calibration and power experiments.

A grid pairs a simulation template with factor lists (grid sizes, group
schemes, shift scales, summaries). Each cell simulates its replicates from
counter-based substreams and records the fraction of doubly ranked tests
rejecting at level alpha. Replicates can be spread over a process pool;
because substream i depends only on (seed, i) and the reduction sums
integer counts, results are identical for any worker count.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

import numpy as np

from ._version import __version__
from .errors import InvalidInputError
from .rank_tests import DoublyRankedConfig, doubly_ranked_test
from .simgen import CoeffDist, MeanShape, NoiseKind, SimConfig, generate_dataset
from .summaries import SummaryKind

__all__ = [
    "ExperimentGrid",
    "CellSpec",
    "CellResult",
    "ResultFormat",
    "run_type1",
    "run_power",
    "write_results",
    "read_results",
    "grid_from_dict",
    "load_grid",
]

_DEFAULT_XI = tuple(round(0.12 * i, 10) for i in range(26))  # 0, 0.12, ..., 3


class ResultFormat(str, Enum):
    CSV = "csv"
    JSONL = "jsonl"


@dataclass(frozen=True)
class ExperimentGrid:
    """Factor grid around a simulation template.

    The template's n_per_group and n_points are overridden by the factor
    lists here; its distribution, noise model, mean shape, basis size and
    seed are shared by every cell. preprocess_pve, when set, smooths each
    simulated dataset before testing.
    """

    base: SimConfig
    n_points_values: tuple[int, ...] = (40, 120, 360)
    group_schemes: tuple[tuple[int, ...], ...] = ((10, 10), (25, 25), (50, 50))
    xi_values: tuple[float, ...] = _DEFAULT_XI
    replicates: int = 2000
    alpha: float = 0.05
    summaries: tuple[SummaryKind, ...] = (
        SummaryKind.SUFFICIENT,
        SummaryKind.AVERAGE_RANK,
    )
    preprocess_pve: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "n_points_values", tuple(int(v) for v in self.n_points_values)
        )
        object.__setattr__(
            self,
            "group_schemes",
            tuple(tuple(int(g) for g in scheme) for scheme in self.group_schemes),
        )
        object.__setattr__(
            self, "xi_values", tuple(float(x) for x in self.xi_values)
        )
        object.__setattr__(
            self, "summaries", tuple(SummaryKind(s) for s in self.summaries)
        )
        if self.replicates < 1:
            raise InvalidInputError("replicates must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInputError("alpha must lie in (0, 1)")
        if not self.n_points_values or not self.group_schemes:
            raise InvalidInputError("factor lists must be nonempty")
        if not self.summaries:
            raise InvalidInputError("need at least one summary")
        if self.preprocess_pve is not None:
            pve = float(self.preprocess_pve)
            if not 0.0 < pve <= 1.0:
                raise InvalidInputError("preprocess_pve must lie in (0, 1]")
            object.__setattr__(self, "preprocess_pve", pve)


@dataclass(frozen=True)
class CellSpec:
    """Full factor combination behind one result row."""

    coeff_dist: CoeffDist
    mean_shape: MeanShape
    xi: float
    noise: NoiseKind
    rho: float
    n_points: int
    n_basis: int
    group_sizes: tuple[int, ...]
    summary: SummaryKind
    alpha: float
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeff_dist", CoeffDist(self.coeff_dist))
        object.__setattr__(self, "mean_shape", MeanShape(self.mean_shape))
        object.__setattr__(self, "noise", NoiseKind(self.noise))
        object.__setattr__(self, "summary", SummaryKind(self.summary))
        object.__setattr__(
            self, "group_sizes", tuple(int(g) for g in self.group_sizes)
        )


@dataclass(frozen=True)
class CellResult:
    cell: CellSpec
    rejection_rate: float
    replicates_used: int
    mc_stderr: float


def _mc_stderr(rate: float, reps: int) -> float:
    return float(np.sqrt(rate * (1.0 - rate) / reps))


def _count_rejections(
    config: SimConfig,
    summaries: tuple[SummaryKind, ...],
    alpha: float,
    rep_start: int,
    rep_stop: int,
    preprocess_pve: float | None,
) -> np.ndarray:
    """Rejection counts per summary over a replicate range (reject: p <= alpha)."""
    counts = np.zeros(len(summaries), dtype=np.int64)
    test_configs = [
        DoublyRankedConfig(summary=s, preprocess_pve=preprocess_pve)
        for s in summaries
    ]
    for rep in range(rep_start, rep_stop):
        data = generate_dataset(config, rep)
        for j, tc in enumerate(test_configs):
            if doubly_ranked_test(data, tc).p_value <= alpha:
                counts[j] += 1
    return counts


def _run_cell_config(
    config: SimConfig,
    summaries: tuple[SummaryKind, ...],
    alpha: float,
    replicates: int,
    preprocess_pve: float | None,
    workers: int,
) -> np.ndarray:
    if workers <= 1 or replicates < 2 * workers:
        return _count_rejections(
            config, summaries, alpha, 0, replicates, preprocess_pve
        )
    bounds = np.linspace(0, replicates, workers + 1).astype(int)
    total = np.zeros(len(summaries), dtype=np.int64)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(
                _count_rejections,
                config,
                summaries,
                alpha,
                int(bounds[i]),
                int(bounds[i + 1]),
                preprocess_pve,
            )
            for i in range(workers)
        ]
        for fut in futures:
            total += fut.result()
    return total


def _cell_spec(config: SimConfig, summary: SummaryKind, alpha: float) -> CellSpec:
    return CellSpec(
        coeff_dist=config.coeff_dist,
        mean_shape=config.mean_shape,
        xi=config.xi,
        noise=config.noise,
        rho=config.rho,
        n_points=config.n_points,
        n_basis=config.n_basis,
        group_sizes=config.n_per_group,
        summary=summary,
        alpha=alpha,
        seed=config.seed,
    )


def run_type1(grid: ExperimentGrid, workers: int = 1) -> list[CellResult]:
    """Null rejection rates: every cell runs with the shift scale at zero.

    Rows are ordered by group scheme, then grid size, then summary. All
    summaries in a cell are evaluated on the same simulated datasets.
    """
    results: list[CellResult] = []
    for scheme in grid.group_schemes:
        for n_points in grid.n_points_values:
            config = replace(
                grid.base, n_per_group=scheme, n_points=n_points, xi=0.0
            )
            counts = _run_cell_config(
                config,
                grid.summaries,
                grid.alpha,
                grid.replicates,
                grid.preprocess_pve,
                workers,
            )
            for summary, count in zip(grid.summaries, counts):
                rate = count / grid.replicates
                results.append(
                    CellResult(
                        cell=_cell_spec(config, summary, grid.alpha),
                        rejection_rate=float(rate),
                        replicates_used=grid.replicates,
                        mc_stderr=_mc_stderr(rate, grid.replicates),
                    )
                )
    return results


def run_power(grid: ExperimentGrid, workers: int = 1) -> list[CellResult]:
    """Rejection rates across the shift grid.

    Rows are ordered by group scheme, then grid size, then summary, then
    shift scale, so each power curve occupies consecutive rows.
    """
    if not grid.xi_values:
        raise InvalidInputError("xi_values must be nonempty")
    results: list[CellResult] = []
    for scheme in grid.group_schemes:
        for n_points in grid.n_points_values:
            per_xi: list[np.ndarray] = []
            configs: list[SimConfig] = []
            for xi in grid.xi_values:
                config = replace(
                    grid.base, n_per_group=scheme, n_points=n_points, xi=xi
                )
                configs.append(config)
                per_xi.append(
                    _run_cell_config(
                        config,
                        grid.summaries,
                        grid.alpha,
                        grid.replicates,
                        grid.preprocess_pve,
                        workers,
                    )
                )
            for j, summary in enumerate(grid.summaries):
                for config, counts in zip(configs, per_xi):
                    rate = counts[j] / grid.replicates
                    results.append(
                        CellResult(
                            cell=_cell_spec(config, summary, grid.alpha),
                            rejection_rate=float(rate),
                            replicates_used=grid.replicates,
                            mc_stderr=_mc_stderr(rate, grid.replicates),
                        )
                    )
    return results


_COLUMNS = [
    "coeff_dist",
    "mean_shape",
    "xi",
    "noise",
    "rho",
    "n_points",
    "n_basis",
    "group_sizes",
    "summary",
    "alpha",
    "seed",
    "replicates",
    "rejection_rate",
    "mc_stderr",
    "version",
]


def _result_record(result: CellResult) -> dict:
    cell = result.cell
    return {
        "coeff_dist": cell.coeff_dist.value,
        "mean_shape": cell.mean_shape.value,
        "xi": cell.xi,
        "noise": cell.noise.value,
        "rho": cell.rho,
        "n_points": cell.n_points,
        "n_basis": cell.n_basis,
        "group_sizes": list(cell.group_sizes),
        "summary": cell.summary.value,
        "alpha": cell.alpha,
        "seed": cell.seed,
        "replicates": result.replicates_used,
        "rejection_rate": result.rejection_rate,
        "mc_stderr": result.mc_stderr,
        "version": __version__,
    }


def _record_to_result(rec: dict) -> CellResult:
    sizes = rec["group_sizes"]
    if isinstance(sizes, str):
        sizes = [int(part) for part in sizes.split("+")]
    cell = CellSpec(
        coeff_dist=CoeffDist(rec["coeff_dist"]),
        mean_shape=MeanShape(rec["mean_shape"]),
        xi=float(rec["xi"]),
        noise=NoiseKind(rec["noise"]),
        rho=float(rec["rho"]),
        n_points=int(rec["n_points"]),
        n_basis=int(rec["n_basis"]),
        group_sizes=tuple(int(g) for g in sizes),
        summary=SummaryKind(rec["summary"]),
        alpha=float(rec["alpha"]),
        seed=int(rec["seed"]),
    )
    return CellResult(
        cell=cell,
        rejection_rate=float(rec["rejection_rate"]),
        replicates_used=int(rec["replicates"]),
        mc_stderr=float(rec["mc_stderr"]),
    )


def write_results(
    results: Sequence[CellResult],
    path: str | os.PathLike,
    format: ResultFormat | str = ResultFormat.CSV,
) -> None:
    """Write one row per cell in a stable column order.

    CSV encodes group sizes as "n1+n2+..."; JSONL keeps them as a list.
    Empty result lists produce a header-only CSV or an empty JSONL file.
    """
    format = ResultFormat(format)
    records = [_result_record(r) for r in results]
    with open(path, "w", newline="") as fh:
        if format is ResultFormat.CSV:
            writer = csv.DictWriter(fh, fieldnames=_COLUMNS)
            writer.writeheader()
            for rec in records:
                rec = dict(rec)
                rec["group_sizes"] = "+".join(str(g) for g in rec["group_sizes"])
                writer.writerow(rec)
        else:
            for rec in records:
                fh.write(json.dumps(rec) + "\n")


def read_results(
    path: str | os.PathLike, format: ResultFormat | str | None = None
) -> list[CellResult]:
    """Parse a results file back into CellResult records.

    The format is inferred from the extension when not given.
    """
    if format is None:
        format = (
            ResultFormat.JSONL
            if str(path).endswith((".jsonl", ".ndjson"))
            else ResultFormat.CSV
        )
    format = ResultFormat(format)
    out: list[CellResult] = []
    with open(path, newline="") as fh:
        if format is ResultFormat.CSV:
            for rec in csv.DictReader(fh):
                out.append(_record_to_result(rec))
        else:
            for line in fh:
                line = line.strip()
                if line:
                    out.append(_record_to_result(json.loads(line)))
    return out


def _xi_list(value) -> tuple[float, ...]:
    if isinstance(value, dict):
        unknown = set(value) - {"start", "stop", "step"}
        if unknown:
            raise InvalidInputError(f"unknown xi range keys: {sorted(unknown)}")
        start = float(value.get("start", 0.0))
        stop = float(value["stop"])
        step = float(value["step"])
        if step <= 0:
            raise InvalidInputError("xi step must be > 0")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    return tuple(float(x) for x in value)


def grid_from_dict(spec: dict) -> ExperimentGrid:
    """Build an ExperimentGrid from a declarative mapping.

    Recognized keys: seed (required), coeff_dist, mean_shape, noise, rho,
    n_basis, n_points (list), groups (list of group-size lists), xi (list
    or {start, stop, step}), replicates, alpha, summaries, preprocess_pve.
    """
    if "seed" not in spec:
        raise InvalidInputError("grid config must set a seed")
    known = {
        "seed",
        "coeff_dist",
        "mean_shape",
        "noise",
        "rho",
        "n_basis",
        "n_points",
        "groups",
        "xi",
        "replicates",
        "alpha",
        "summaries",
        "preprocess_pve",
    }
    unknown = set(spec) - known
    if unknown:
        raise InvalidInputError(f"unknown grid config keys: {sorted(unknown)}")

    defaults = ExperimentGrid(
        base=SimConfig(n_per_group=(2, 2), n_points=1, seed=0)
    )
    base = SimConfig(
        n_per_group=(2, 2),
        n_points=1,
        n_basis=int(spec.get("n_basis", 1000)),
        coeff_dist=CoeffDist(spec.get("coeff_dist", "gaussian")),
        mean_shape=MeanShape(spec.get("mean_shape", "none")),
        noise=NoiseKind(spec.get("noise", "ar1")),
        rho=float(spec.get("rho", 0.5)),
        seed=int(spec["seed"]),
    )
    return ExperimentGrid(
        base=base,
        n_points_values=tuple(
            int(v) for v in spec.get("n_points", defaults.n_points_values)
        ),
        group_schemes=tuple(
            tuple(int(g) for g in scheme)
            for scheme in spec.get("groups", defaults.group_schemes)
        ),
        xi_values=_xi_list(spec.get("xi", _DEFAULT_XI)),
        replicates=int(spec.get("replicates", defaults.replicates)),
        alpha=float(spec.get("alpha", defaults.alpha)),
        summaries=tuple(
            SummaryKind(s) for s in spec.get("summaries", defaults.summaries)
        ),
        preprocess_pve=spec.get("preprocess_pve"),
    )


def load_grid(path: str | os.PathLike) -> ExperimentGrid:
    """Load an ExperimentGrid from a JSON config file."""
    with open(path) as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(spec, dict):
        raise InvalidInputError(f"grid config {path} must be a JSON object")
    return grid_from_dict(spec)
