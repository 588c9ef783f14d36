"""GRADE-AO construction of high-memory QC spatially-coupled LDPC codes."""

from .ao import ao_cycles, ao_objects, best_of_restarts
from .grade import find_optimal_coupling_pattern, grade_cycles, grade_objects
from .lifting import cpo_lift
from .pipeline import ConstructionConfig, construct_code
from .schema import (
    CodeParams,
    CycleWeights,
    EdgeDistribution,
    GradeConfig,
    LiftingMatrix,
    ObjectWeights,
    PartitioningMatrix,
    SearchBudget,
)
from .topology import count_active_candidates, count_cycles_tanner, count_objects

__all__ = [
    "CodeParams",
    "EdgeDistribution",
    "PartitioningMatrix",
    "LiftingMatrix",
    "CycleWeights",
    "ObjectWeights",
    "GradeConfig",
    "SearchBudget",
    "grade_cycles",
    "grade_objects",
    "find_optimal_coupling_pattern",
    "ao_cycles",
    "ao_objects",
    "best_of_restarts",
    "cpo_lift",
    "count_active_candidates",
    "count_cycles_tanner",
    "count_objects",
    "ConstructionConfig",
    "construct_code",
]
