from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from .model import distribution_from_matrix
from .schema import CodeParams, EdgeDistribution
from .topology import count_active_candidates, count_cycles_tanner, count_objects

COUNT_COLUMNS = ("cycles4", "cycles6", "cycles8", "t212", "t213", "t222", "t313")


@dataclass(slots=True)
class CodeStatistics:
    """Cycle and object counts of one code, at protograph or Tanner-graph level."""

    label: str
    level: str
    cycles4: int
    cycles6: int
    cycles8: int
    t212: int
    t213: int
    t222: int
    t313: int
    constraint_length: int
    distribution: tuple[float, ...]
    l1_distance: float | None = None
    linf_distance: float | None = None

    def counts(self) -> dict[str, int]:
        return {column: int(getattr(self, column)) for column in COUNT_COLUMNS}


def distribution_distances(
    empirical: EdgeDistribution,
    reference: EdgeDistribution,
) -> tuple[float, float]:
    """L1 and L-infinity distances between two distributions over the same pattern."""
    gap = empirical.as_array() - reference.as_array()
    return float(np.abs(gap).sum()), float(np.abs(gap).max())


def _statistics(
    label: str,
    level: str,
    matrix: np.ndarray,
    params: CodeParams,
    cycles: tuple[int, int, int],
    objects: dict[str, int],
    reference: EdgeDistribution | None,
) -> CodeStatistics:
    empirical = distribution_from_matrix(matrix, params)
    l1 = linf = None
    if reference is not None:
        l1, linf = distribution_distances(empirical, reference)
    return CodeStatistics(
        label=label,
        level=level,
        cycles4=cycles[0],
        cycles6=cycles[1],
        cycles8=cycles[2],
        constraint_length=params.constraint_length,
        distribution=empirical.probs,
        l1_distance=l1,
        linf_distance=linf,
        **objects,
    )


def protograph_statistics(
    matrix: np.ndarray,
    params: CodeParams,
    reference: EdgeDistribution | None = None,
    label: str = "",
) -> CodeStatistics:
    """Active candidate and object counts of a partitioning matrix."""
    cycles = tuple(count_active_candidates(matrix, length) for length in (4, 6, 8))
    objects = count_objects(matrix, params).as_dict()
    return _statistics(label, "protograph", matrix, params, cycles, objects, reference)


def tanner_statistics(
    matrix: np.ndarray,
    lifting: np.ndarray,
    params: CodeParams,
    reference: EdgeDistribution | None = None,
    label: str = "",
) -> CodeStatistics:
    """Cycle and object counts of the lifted SC Tanner graph."""
    cycles = tuple(
        count_cycles_tanner(matrix, lifting, params, length) for length in (4, 6, 8)
    )
    objects = count_objects(matrix, params, lifting=lifting).as_dict()
    return _statistics(label, "tanner", matrix, params, cycles, objects, reference)


def statistics_frame(rows: list[CodeStatistics]) -> pd.DataFrame:
    """One row per statistics record, counts as integer columns."""
    frame = pd.DataFrame([asdict(row) for row in rows])
    if frame.empty:
        return pd.DataFrame(columns=["label", "level", *COUNT_COLUMNS])
    return frame.astype({column: "int64" for column in COUNT_COLUMNS})


def summarize(rows: list[CodeStatistics]) -> dict[str, dict[str, float]]:
    """Median, minimum and maximum of every count column."""
    if not rows:
        return {column: {"median": 0.0, "min": 0.0, "max": 0.0} for column in COUNT_COLUMNS}

    frame = statistics_frame(rows)
    return {
        column: {
            "median": float(frame[column].median()),
            "min": float(frame[column].min()),
            "max": float(frame[column].max()),
        }
        for column in COUNT_COLUMNS
    }
