"""Tests for topology.py: candidate enumeration, cycle conditions, spans and object counts."""
from __future__ import annotations

import networkx as nx
import numpy as np
import pytest

from grade_ao.errors import NotACandidate, TooLarge, ValidationError
from grade_ao.schema import CodeParams, CycleCandidate, EdgeDistribution
from grade_ao.topology import (
    brute_force_expected_count,
    candidate_offsets,
    candidate_span,
    canonical_form,
    check_lifting_condition,
    check_partition_condition,
    count_active_candidates,
    count_cycles_tanner,
    count_objects,
    enumerate_cycle4,
    enumerate_cycle6,
    enumerate_cycle8,
    enumerate_cycles,
    enumerate_paths,
)


def _complete_bipartite_cycles(gamma: int, kappa: int, length: int) -> int:
    graph = nx.complete_bipartite_graph(gamma, kappa)
    return sum(1 for cycle in nx.simple_cycles(graph, length_bound=length) if len(cycle) == length)


def _sc_tanner_graph(matrix: np.ndarray, lifting: np.ndarray, params: CodeParams) -> nx.Graph:
    """Explicit SC Tanner graph: L replicas of every VN, CN block b = r + P[i][j]."""
    z = params.circulant
    graph = nx.Graph()
    for r in range(params.replicas):
        for i, j in np.ndindex(matrix.shape):
            block = r + int(matrix[i, j])
            for t in range(z):
                graph.add_edge(("v", r, j, t), ("c", block, i, (t + int(lifting[i, j])) % z))
    return graph


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

class TestEnumeration:
    def test_candidate_totals(self):
        assert len(enumerate_cycle4(3, 5)) == 30
        assert len(enumerate_cycle6(3, 3)) == 6
        assert len(enumerate_cycle6(3, 7)) == 210
        assert len(enumerate_cycle6(2, 7)) == 0

    def test_cycle8_structures(self):
        counts = enumerate_cycle8(4, 4).structure_counts()
        assert counts == {1: 36, 2: 144, 3: 288, 4: 72, 5: 288, 6: 72}

    def test_cycle8_three_by_three(self):
        candidates = enumerate_cycle8(3, 3)
        assert len(candidates) == 45
        assert candidates.structure_counts() == {1: 9, 2: 18, 3: 18}

    @pytest.mark.parametrize("gamma, kappa, length", [(3, 4, 6), (4, 4, 6), (4, 4, 8)])
    def test_simple_cycles_match_networkx(self, gamma, kappa, length):
        candidates = enumerate_cycles(gamma, kappa, length // 2)
        simple = sum(
            1 for k in range(len(candidates))
            if len(set(candidates.cols[k])) == length // 2
            and len(set(candidates.rows[k])) == length // 2
        )
        assert simple == _complete_bipartite_cycles(gamma, kappa, length)

    def test_candidates_listed_once(self):
        candidates = enumerate_cycle8(3, 4)
        forms = {
            canonical_form(tuple(candidates.cols[k]), tuple(candidates.rows[k]))
            for k in range(len(candidates))
        }
        assert len(forms) == len(candidates)

    def test_per_entry_lists(self):
        candidates = enumerate_cycle6(3, 3)
        for row in range(3):
            for col in range(3):
                assert len(candidates.through(row, col)) == 4

    def test_entry_index_agrees_with_through(self):
        candidates = enumerate_cycle6(3, 4)
        ids, net = candidates.entry_index().lookup(1 * 4 + 2)
        assert ids.size == len(candidates.through(1, 2))
        assert np.all(np.abs(net) == 1)

    def test_half_length_too_small(self):
        with pytest.raises(ValidationError):
            enumerate_cycles(3, 3, 1)


# ---------------------------------------------------------------------------
# Single-candidate conditions
# ---------------------------------------------------------------------------

class TestConditions:
    def test_partition_condition(self):
        candidate = CycleCandidate(cols=(0, 1), rows=(0, 1))
        assert check_partition_condition(candidate, [[0, 1], [0, 1]])
        assert not check_partition_condition(candidate, [[0, 1], [0, 0]])

    def test_lifting_condition(self):
        candidate = CycleCandidate(cols=(0, 1), rows=(0, 1))
        assert check_lifting_condition(candidate, [[5, 12], [0, 0]], 7)
        assert not check_lifting_condition(candidate, [[5, 11], [0, 0]], 7)

    def test_span(self):
        candidate = CycleCandidate(cols=(0, 1), rows=(0, 1))
        assert candidate_offsets(candidate, [[0, 1], [0, 1]]) == [0, -1, 0]
        assert candidate_span(candidate, [[0, 1], [0, 1]]) == 1
        assert candidate_span(candidate, [[2, 2], [2, 2]]) == 0

    def test_span_of_inactive_candidate(self):
        with pytest.raises(NotACandidate):
            candidate_span(CycleCandidate(cols=(0, 1), rows=(0, 1)), [[0, 1], [0, 0]])

    def test_candidate_outside_matrix(self):
        with pytest.raises(IndexError):
            check_partition_condition(CycleCandidate(cols=(0, 3), rows=(0, 1)), np.zeros((2, 2)))

    def test_vectorized_spans_match_single(self, random_matrix):
        candidates = enumerate_cycle6(3, 5)
        active = np.flatnonzero(candidates.active(random_matrix))
        spans = candidates.spans(random_matrix)
        for k in active[:20]:
            assert spans[k] == candidate_span(candidates.candidate(int(k)), random_matrix)


# ---------------------------------------------------------------------------
# Cycle counting
# ---------------------------------------------------------------------------

class TestCycleCounts:
    def test_all_zero_matrix(self, zeros3x3):
        assert count_active_candidates(zeros3x3, 4) == 9
        assert count_active_candidates(zeros3x3, 6) == 6
        assert count_active_candidates(zeros3x3, 8) == 45

    def test_counts_match_single_checks(self, random_matrix):
        candidates = enumerate_cycle6(3, 5)
        expected = sum(
            check_partition_condition(candidates.candidate(k), random_matrix)
            for k in range(len(candidates))
        )
        assert count_active_candidates(random_matrix, 6) == expected

    def test_tanner_all_zero(self, zeros3x3):
        params = CodeParams.full_memory(3, 3, 1)
        assert count_cycles_tanner(zeros3x3, zeros3x3, params, 6) == 6

    def test_tanner_conventions(self):
        params = CodeParams.full_memory(2, 2, 1, circulant=1, replicas=3)
        matrix = np.array([[0, 1], [0, 1]])
        lifting = np.zeros((2, 2), dtype=np.int64)
        assert count_cycles_tanner(matrix, lifting, params, 4) == 2
        assert count_cycles_tanner(matrix, lifting, params, 4, convention="full") == 3

    def test_tanner_scales_with_circulant(self, zeros3x3):
        params = CodeParams.full_memory(3, 3, 1, circulant=5, replicas=4)
        assert count_cycles_tanner(zeros3x3, zeros3x3, params, 6) == 6 * 5 * 4

    def test_tanner_counts_match_explicit_graph(self):
        params = CodeParams.full_memory(3, 4, 2, circulant=5, replicas=4)
        matrix = np.array([[2, 1, 0, 2], [1, 0, 0, 1], [2, 0, 0, 1]])
        lifting = np.array([[1, 4, 4, 0], [1, 2, 3, 4], [3, 2, 2, 2]])
        graph = _sc_tanner_graph(matrix, lifting, params)
        lengths = [len(cycle) for cycle in nx.simple_cycles(graph, length_bound=8)]
        for length, expected in ((4, 0), (6, 55), (8, 135)):
            assert lengths.count(length) == expected
            assert count_cycles_tanner(matrix, lifting, params, length) == expected

    def test_tanner_bad_arguments(self, zeros3x3, tiny_params):
        with pytest.raises(ValidationError):
            count_cycles_tanner(zeros3x3, zeros3x3, tiny_params, 5)
        with pytest.raises(ValidationError):
            count_cycles_tanner(zeros3x3, zeros3x3, tiny_params, 6, convention="half")


# ---------------------------------------------------------------------------
# Paths and objects
# ---------------------------------------------------------------------------

class TestPaths:
    def test_path_list_sizes(self):
        first, second, third = enumerate_paths(4, 6)
        assert len(first.lookup(2, 2, 0, 1)) == 1
        assert len(second.lookup(0, 1, 0, 1)) == 6 - 2
        assert len(third.lookup(0, 1, 0, 1)) == 2 * 4 * 3
        assert len(third.lookup(0, 0, 0, 1)) == 3 * 4 * 3

    def test_path_shape(self):
        _, _, third = enumerate_paths(4, 6)
        path = third.path(0)
        assert path.kind == 3
        assert len(path.rows) == 3 and len(path.cols) == 4
        assert path.rows[1] not in (path.rows[0], path.rows[2])


class TestObjectCounts:
    def test_all_zero_three_by_three(self, zeros3x3, tiny_params):
        counts = count_objects(zeros3x3, tiny_params)
        assert (counts.t212, counts.t213, counts.t222, counts.t313) == (108, 0, 24, 0)

    def test_lifted_counts_equal_protograph_for_trivial_lifting(self, zeros3x3, tiny_params):
        lifted = count_objects(zeros3x3, tiny_params, lifting=zeros3x3)
        assert lifted == count_objects(zeros3x3, tiny_params)

    def test_two_rows_have_no_two_two_two(self):
        params = CodeParams.full_memory(2, 5, 1)
        assert count_objects(np.zeros((2, 5), dtype=np.int64), params).t222 == 0

    def test_lifted_counts_bounded(self, random_matrix, lifted_params):
        lifting = np.random.default_rng(3).integers(0, lifted_params.circulant, size=(3, 5))
        lifted = count_objects(random_matrix, lifted_params, lifting=lifting)
        base = count_objects(random_matrix, lifted_params)
        scale = lifted_params.circulant * lifted_params.replicas
        for key, value in lifted.as_dict().items():
            assert 0 <= value <= scale * base.as_dict()[key]


class TestBruteForce:
    def test_uncoupled_counts_every_candidate(self):
        assert brute_force_expected_count(3, 3, (0,), (1.0,), 6) == pytest.approx(6.0)

    def test_too_large(self):
        with pytest.raises(TooLarge):
            brute_force_expected_count(4, 5, (0, 1, 2), EdgeDistribution.uniform(3), 6)
