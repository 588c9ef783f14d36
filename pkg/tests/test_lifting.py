"""Tests for lifting.py: the greedy lifting optimizer."""
from __future__ import annotations

import numpy as np
import pytest

from grade_ao.errors import ValidationError
from grade_ao.lifting import cpo_lift
from grade_ao.schema import CodeParams, LiftTargets, ObjectWeights
from grade_ao.topology import count_cycles_tanner


class TestCpoLift:
    def test_entries_in_circulant_range(self, random_matrix, lifted_params):
        result = cpo_lift(random_matrix, lifted_params, seed=1)
        lifting = np.asarray(result.matrix)
        assert lifting.shape == (3, 5)
        assert lifting.min() >= 0 and lifting.max() < lifted_params.circulant

    def test_cycles4_match_tanner_count(self, random_matrix, lifted_params):
        result = cpo_lift(random_matrix, lifted_params, seed=2)
        recount = count_cycles_tanner(random_matrix, result.matrix, lifted_params, 4)
        assert result.cycles4 == recount
        assert result.cycles4_free == (recount == 0)

    def test_trace_strictly_decreases(self, random_matrix, lifted_params):
        trace = cpo_lift(random_matrix, lifted_params, seed=3).trace
        assert all(b < a for a, b in zip(trace, trace[1:]))

    def test_removes_cycles4_with_large_circulant(self):
        params = CodeParams.full_memory(3, 5, 1, circulant=31, replicas=2)
        result = cpo_lift(np.zeros((3, 5), dtype=np.int64), params, seed=0)
        assert result.cycles4_free
        assert result.restarts == 1

    def test_trivial_circulant_keeps_protograph_cycles(self, zeros3x3):
        params = CodeParams.full_memory(3, 3, 1, circulant=1, replicas=2)
        result = cpo_lift(zeros3x3, params, LiftTargets(max_restarts=2), seed=0)
        assert np.asarray(result.matrix).tolist() == [[0, 0, 0]] * 3
        assert result.cycles4 == 9 * 2
        assert not result.cycles4_free
        assert result.restarts == 2

    def test_deterministic(self, random_matrix, lifted_params):
        first = cpo_lift(random_matrix, lifted_params, seed=4)
        again = cpo_lift(random_matrix, lifted_params, seed=4)
        assert first.matrix == again.matrix

    def test_object_targets(self, random_matrix, lifted_params):
        targets = LiftTargets(objects=ObjectWeights())
        result = cpo_lift(random_matrix, lifted_params, targets, seed=5)
        assert all(b < a for a, b in zip(result.trace, result.trace[1:]))
        assert result.cycles4 == count_cycles_tanner(
            random_matrix, result.matrix, lifted_params, 4
        )

    def test_rejects_matrix_outside_pattern(self, lifted_params):
        bad = np.full((3, 5), 7, dtype=np.int64)
        with pytest.raises(ValidationError):
            cpo_lift(bad, lifted_params)
