"""Tests for schema.py: parameter helpers and immutable matrix wrappers."""
from __future__ import annotations

import math

import numpy as np
import pytest

from grade_ao.schema import (
    CodeParams,
    CycleCandidate,
    EdgeDistribution,
    GradeResult,
    ObjectCounts,
    ObjectWeights,
    PartitioningMatrix,
    Path,
    SearchBudget,
)


class TestCodeParams:
    def test_full_memory_pattern(self):
        params = CodeParams.full_memory(3, 7, 5, circulant=13, replicas=100)
        assert params.pattern == (0, 1, 2, 3, 4, 5)
        assert params.is_full_memory
        assert params.pseudo_memory == 5

    def test_non_full_memory(self):
        params = CodeParams(4, 20, 6, (0, 1, 4, 6))
        assert not params.is_full_memory
        assert params.pseudo_memory == 3
        assert params.values().tolist() == [0, 1, 4, 6]

    def test_entry_count_and_constraint_length(self):
        params = CodeParams.full_memory(3, 7, 5, circulant=13)
        assert params.entry_count == 21
        assert params.constraint_length == 78


class TestEdgeDistribution:
    def test_uniform(self):
        p = EdgeDistribution.uniform(4)
        assert p.probs == (0.25, 0.25, 0.25, 0.25)
        assert len(p) == 4

    def test_from_array_flattens(self):
        p = EdgeDistribution.from_array(np.array([[0.5], [0.5]]))
        assert p.probs == (0.5, 0.5)
        assert p.as_array().dtype == float


class TestPartitioningMatrix:
    def test_entries_are_read_only(self):
        matrix = PartitioningMatrix([[0, 1], [1, 0]])
        with pytest.raises(ValueError):
            matrix.entries[0, 0] = 5

    def test_copy_on_construction(self):
        source = np.array([[0, 1], [1, 0]])
        matrix = PartitioningMatrix(source)
        source[0, 0] = 9
        assert matrix.entries[0, 0] == 0

    def test_equality_and_array_protocol(self):
        a = PartitioningMatrix([[0, 1], [1, 0]])
        b = PartitioningMatrix(np.array([[0, 1], [1, 0]]))
        assert a == b
        assert np.asarray(a).shape == (2, 2)
        assert a.shape == (2, 2)


class TestSearchBudget:
    def test_default_for(self):
        budget = SearchBudget.default_for(CodeParams.full_memory(3, 7, 5))
        assert budget.d1 == 3
        assert budget.d2 == 2

    def test_unlimited(self):
        budget = SearchBudget.unlimited()
        assert math.isinf(budget.d1) and math.isinf(budget.d2)


class TestObjectCounts:
    def test_weighted(self):
        counts = ObjectCounts(t212=1, t213=2, t222=3, t313=4)
        assert counts.weighted(ObjectWeights()) == 10
        assert counts.weighted(ObjectWeights(w212=10, w313=0)) == 10 + 2 + 3

    def test_as_dict(self):
        assert ObjectCounts(1, 0, 0, 2).as_dict() == {"t212": 1, "t213": 0, "t222": 0, "t313": 2}


class TestCandidateAndPath:
    def test_candidate_nodes_interleave(self):
        candidate = CycleCandidate(cols=(0, 1, 2), rows=(0, 1, 2))
        assert candidate.nodes == (0, 0, 1, 1, 2, 2)
        assert candidate.length == 6

    def test_path_endpoints(self):
        path = Path(kind=2, rows=(0, 2), cols=(1, 3, 4))
        assert path.endpoints == ((0, 1), (2, 4))


class TestGradeResult:
    def test_summary_keys(self):
        result = GradeResult(EdgeDistribution((1.0,)), 1.0, 1.0, 1, True)
        assert set(result.to_summary()) == {
            "objective_initial",
            "objective_final",
            "iters",
            "converged",
        }
