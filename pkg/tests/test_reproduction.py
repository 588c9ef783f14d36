"""Long reproduction runs: shipped-code counts, pattern searches and construction quality.

Deselected by default; run with ``pytest -m slow``.
"""
from __future__ import annotations

from functools import partial

import numpy as np
import pytest

from grade_ao.ao import ao_cycles, ao_objects, best_of_restarts, run_restarts
from grade_ao.grade import (
    cycle_pattern_evaluator,
    find_optimal_coupling_pattern,
    grade_cycles,
    grade_objects,
    object_pattern_evaluator,
)
from grade_ao.io_utils import read_matrix
from grade_ao.objects import concatenated_cycles
from grade_ao.schema import CodeParams, EdgeDistribution, ObjectWeights
from grade_ao.topology import count_active_candidates, count_cycles_tanner, count_objects

pytestmark = pytest.mark.slow

TWO_CYCLES8 = [(concatenated_cycles("3-1-3"), 1.0)]
T212_ONLY = ObjectWeights(w212=1, w213=0, w222=0, w313=0)


def _load(codes_dir, name):
    partitioning = read_matrix(codes_dir / f"{name}.P.txt")
    lifting = read_matrix(codes_dir / f"{name}.L.txt")
    return partitioning.entries, lifting.entries, partitioning.header.params()


# ---------------------------------------------------------------------------
# Shipped-code cycle and object counts
# ---------------------------------------------------------------------------

# Tanner-graph counts of the shipped matrices, cross-checked against an explicit graph walk.
CYCLES6 = {
    "nlm_gd_4_24": 33_728,
    "nlm_tc_4_24": 32_130,
    "nlm_unf_4_24": 57_698,
    "bsc_gd_4_24": 34_459,
    "bsc_tc_4_24": 33_218,
    "bsc_unf_4_24": 57_698,
    "gd_4_20": 8_619,
    "tc_4_20": 10_088,
    "unf_4_20": 14_105,
}
# (t212, t213, t222, t313)
OBJECTS = {
    "nlm_gd_4_24": (1_751, 3_067_293, 981_903, 256_796_339),
    "nlm_tc_4_24": (4_301, 2_822_459, 987_751, 250_741_092),
    "nlm_unf_4_24": (8_551, 7_295_040, 1_878_976, 484_387_970),
    "bsc_gd_4_24": (1_802, 3_151_307, 1_002_949, 259_851_409),
    "bsc_tc_4_24": (5_831, 2_935_373, 1_005_992, 254_298_563),
    "gd_4_20": (338, 608_140, 192_348, 39_023_023),
    "tc_4_20": (1_768, 726_453, 209_209, 44_050_240),
    "unf_4_20": (2_860, 1_426_841, 371_150, 75_991_266),
}
GROUPS = [
    ("nlm_gd_4_24", "nlm_tc_4_24", "nlm_unf_4_24"),
    ("bsc_gd_4_24", "bsc_tc_4_24", "bsc_unf_4_24"),
    ("gd_4_20", "tc_4_20", "unf_4_20"),
]


class TestShippedCodeCounts:
    @pytest.mark.parametrize("name, cycles8", [("gd_4_29", 533_716), ("unf_4_29", 1_098_230)])
    def test_cycle8_counts(self, codes_dir, name, cycles8):
        matrix, lifting, params = _load(codes_dir, name)
        assert count_cycles_tanner(matrix, lifting, params, 6) == 0
        assert count_cycles_tanner(matrix, lifting, params, 8) == cycles8

    @pytest.mark.parametrize("name", sorted(CYCLES6))
    def test_cycle6_counts(self, codes_dir, name):
        matrix, lifting, params = _load(codes_dir, name)
        assert count_cycles_tanner(matrix, lifting, params, 6) == CYCLES6[name]

    @pytest.mark.parametrize("name", sorted(OBJECTS))
    def test_object_counts(self, codes_dir, name):
        matrix, lifting, params = _load(codes_dir, name)
        counts = count_objects(matrix, params, lifting=lifting)
        assert (counts.t212, counts.t213, counts.t222, counts.t313) == OBJECTS[name]

    @pytest.mark.parametrize("group", GROUPS)
    def test_gradient_codes_have_fewest_two_one_two(self, codes_dir, group):
        t212 = []
        for name in group:
            matrix, lifting, params = _load(codes_dir, name)
            t212.append(count_objects(matrix, params, lifting=lifting).t212)
        assert t212[0] < t212[1] < t212[2]

    def test_same_uniform_matrices_for_both_channels(self, codes_dir):
        nlm = _load(codes_dir, "nlm_unf_4_24")
        bsc = _load(codes_dir, "bsc_unf_4_24")
        assert np.array_equal(nlm[0], bsc[0]) and np.array_equal(nlm[1], bsc[1])


# ---------------------------------------------------------------------------
# Distributions and coupling patterns
# ---------------------------------------------------------------------------

class TestGradeReproduction:
    def test_two_cycles8_memory_six(self):
        result = grade_objects(TWO_CYCLES8, CodeParams.full_memory(4, 24, 6))
        expected = [0.2991, 0.0899, 0.0749, 0.0733, 0.0749, 0.0896, 0.2984]
        assert result.distribution.as_array() == pytest.approx(expected, abs=0.02)

    def test_two_cycles8_memory_nine(self):
        result = grade_objects(TWO_CYCLES8, CodeParams.full_memory(4, 29, 9))
        expected = [0.2648, 0.0803, 0.0509, 0.0526, 0.0519, 0.0519, 0.0525, 0.0508, 0.0801, 0.2644]
        assert result.distribution.as_array() == pytest.approx(expected, abs=0.02)

    def test_cycle_pattern_search(self):
        found = find_optimal_coupling_pattern(4, 2, cycle_pattern_evaluator(3, 7))
        assert found.pattern == (0, 1, 4)

    @pytest.mark.parametrize(
        "memory, pseudo_memory, pattern",
        [(6, 3, (0, 1, 4, 6)), (9, 4, (0, 1, 4, 7, 9))],
    )
    def test_object_pattern_search(self, memory, pseudo_memory, pattern):
        evaluate = object_pattern_evaluator(TWO_CYCLES8, 4, 24)
        found = find_optimal_coupling_pattern(memory, pseudo_memory, evaluate, max_workers=4)
        assert found.pattern == pattern


# ---------------------------------------------------------------------------
# Construction quality
# ---------------------------------------------------------------------------

class TestConstructionQuality:
    def test_cycle_free_protograph_at_memory_five(self):
        params = CodeParams.full_memory(3, 7, 5)
        p = grade_cycles(params).distribution
        best = best_of_restarts(partial(ao_cycles, params, p), seed=0, restarts=20)
        assert count_active_candidates(best.matrix, 6) == 0
        assert count_active_candidates(best.matrix, 8) == 0

    def test_gradient_distribution_beats_uniform(self):
        params = CodeParams.full_memory(4, 24, 6)
        gd = grade_objects(TWO_CYCLES8, params).distribution
        uniform = EdgeDistribution.uniform(7)

        def median_t212(p):
            optimizer = partial(ao_objects, params, p, T212_ONLY)
            runs = run_restarts(optimizer, seed=0, restarts=20, threads=4)
            return float(np.median([run.objective for run in runs]))

        assert median_t212(gd) <= 0.6 * median_t212(uniform)
