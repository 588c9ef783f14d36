"""End-to-end construction: edge distribution, partitioning (AO), then lifting (CPO)."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Any

from .ao import ao_cycles, ao_objects, run_restarts, select_best
from .errors import ValidationError
from .evaluation import CodeStatistics, protograph_statistics, summarize, tanner_statistics
from .grade import grade_cycles, grade_objects
from .io_utils import read_distribution
from .lifting import cpo_lift
from .model import validate_distribution, validate_params
from .objects import ObjectGraph, concatenated_cycles
from .schema import (
    AoResult,
    CodeParams,
    CycleWeights,
    EdgeDistribution,
    GradeConfig,
    GradeResult,
    LiftResult,
    LiftTargets,
    ObjectWeights,
    SearchBudget,
)
from .settings import DEFAULT_SEED

logger = logging.getLogger(__name__)

OBJECTIVES = ("cycles", "objects")
DISTRIBUTION_SOURCES = ("grade", "uniform", "file")


def default_grade_objects() -> list[tuple[ObjectGraph, float]]:
    """Two concatenated cycles-8 (the 3-1-3 object), unit weight."""
    return [(concatenated_cycles("3-1-3"), 1.0)]


@dataclass(slots=True)
class ConstructionConfig:
    """Knobs of one construction run; defaults give a GD code optimized for cycles."""

    objective: str = "cycles"
    distribution: str = "grade"
    distribution_path: str | None = None
    cycle_weights: CycleWeights = field(default_factory=CycleWeights)
    object_weights: ObjectWeights = field(default_factory=ObjectWeights)
    grade_config: GradeConfig = field(default_factory=GradeConfig)
    budget: SearchBudget | None = None
    restarts: int = 20
    seed: int = DEFAULT_SEED
    threads: int = 1
    lift: bool = True
    lift_restarts: int = 5


@dataclass(slots=True)
class ConstructionResult:
    """Everything a construction produced, from distribution to lifted statistics."""

    params: CodeParams
    distribution: EdgeDistribution
    grade: GradeResult | None
    ao: AoResult
    runs: list[AoResult]
    lift: LiftResult | None
    statistics: list[CodeStatistics]

    def to_report(self) -> dict[str, Any]:
        report: dict[str, Any] = {
            "params": {
                "gamma": self.params.gamma,
                "kappa": self.params.kappa,
                "memory": self.params.memory,
                "pattern": list(self.params.pattern),
                "circulant": self.params.circulant,
                "replicas": self.params.replicas,
            },
            "distribution": list(self.distribution.probs),
            "seed": self.ao.seed,
            "ao": {
                "objective": self.ao.objective,
                "initial_objective": self.ao.initial_objective,
                "moves": self.ao.moves,
                "deviation": list(self.ao.deviation),
                "trace": list(self.ao.trace),
            },
            "restarts": [{"seed": run.seed, "objective": run.objective} for run in self.runs],
            "restart_summary": summarize(
                [
                    protograph_statistics(run.matrix, self.params, label=f"seed-{run.seed}")
                    for run in self.runs
                ]
            ),
            "statistics": {
                row.level: {
                    **row.counts(),
                    "constraint_length": row.constraint_length,
                    "l1_distance": row.l1_distance,
                    "linf_distance": row.linf_distance,
                }
                for row in self.statistics
            },
        }
        if self.grade is not None:
            report["grade"] = self.grade.to_summary()
        if self.lift is not None:
            report["lift"] = {
                "cycles4": self.lift.cycles4,
                "cycles4_free": self.lift.cycles4_free,
                "objective": self.lift.objective,
                "restarts": self.lift.restarts,
                "trace": list(self.lift.trace),
            }
        return report


def resolve_distribution(
    params: CodeParams,
    config: ConstructionConfig,
) -> tuple[EdgeDistribution, GradeResult | None]:
    """Edge distribution for the run: GRADE output, uniform, or loaded from a file."""
    if config.distribution == "uniform":
        return EdgeDistribution.uniform(len(params.pattern)), None
    if config.distribution == "file":
        if not config.distribution_path:
            raise ValidationError("distribution source 'file' needs a distribution path")
        p = read_distribution(config.distribution_path)
        return validate_distribution(p, size=len(params.pattern), allow_zero=True), None
    if config.distribution != "grade":
        raise ValidationError(f"unknown distribution source {config.distribution!r}")
    if config.objective == "objects":
        result = grade_objects(default_grade_objects(), params, config.grade_config)
    else:
        result = grade_cycles(params, config.grade_config, config.cycle_weights)
    return result.distribution, result


def construct_code(
    params: CodeParams,
    config: ConstructionConfig = ConstructionConfig(),
) -> ConstructionResult:
    """Run the full construction and collect statistics.

    Args:
        params: Code parameters, including z and L for lifting.
        config: Distribution source, objective, weights, budget and restart settings.

    Returns:
        `ConstructionResult` with the best AO run, every restart, the lifting result (if
        requested) and protograph/Tanner statistics.
    """
    validate_params(params)
    if config.objective not in OBJECTIVES:
        raise ValidationError(f"objective must be one of {OBJECTIVES}, got {config.objective!r}")
    p, grade_result = resolve_distribution(params, config)

    if config.objective == "objects":
        optimizer = partial(ao_objects, params, p, config.object_weights, config.budget)
        targets = LiftTargets(objects=config.object_weights, max_restarts=config.lift_restarts)
    else:
        optimizer = partial(ao_cycles, params, p, config.cycle_weights, config.budget)
        targets = LiftTargets(
            cycle6=config.cycle_weights.cycle6,
            cycle8=config.cycle_weights.cycle8,
            max_restarts=config.lift_restarts,
        )

    runs = run_restarts(optimizer, config.seed, config.restarts, config.threads)
    best = select_best(runs)
    statistics = [protograph_statistics(best.matrix, params, reference=p, label="protograph")]

    lift_result = None
    if config.lift:
        lift_result = cpo_lift(best.matrix, params, targets, seed=config.seed)
        statistics.append(
            tanner_statistics(best.matrix, lift_result.matrix, params, reference=p, label="tanner")
        )
    logger.info(
        "constructed (%d,%d) m=%d code: AO objective %.6g",
        params.gamma,
        params.kappa,
        params.memory,
        best.objective,
    )
    return ConstructionResult(
        params=params,
        distribution=p,
        grade=grade_result,
        ao=best,
        runs=runs,
        lift=lift_result,
        statistics=statistics,
    )
