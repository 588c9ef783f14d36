"""Tests for objects.py: object graphs, automorphisms and prototype classes."""
from __future__ import annotations

import math

import pytest

from grade_ao.errors import ValidationError
from grade_ao.objects import (
    CONCATENATED_KINDS,
    ObjectGraph,
    concatenated_cycles,
    cycle_object,
    edge_class_monomials,
    enumerate_prototype_classes,
    typical_class,
)


class TestCycleObject:
    @pytest.mark.parametrize("g", [2, 3, 4])
    def test_shape(self, g):
        obj = cycle_object(g)
        assert len(obj.vns) == len(obj.cns) == g
        assert len(obj.edges) == 2 * g
        assert obj.basis_size == 1
        assert obj.incidence.sum() == 0

    def test_cycle6_has_six_automorphisms(self):
        assert len(cycle_object(3).automorphisms()) == 6
        assert typical_class(cycle_object(3)).aut_order == 6

    def test_cycle4_typical_cardinality(self):
        cls = typical_class(cycle_object(2))
        assert cls.aut_order == 4
        assert cls.cardinality(3, 5) == math.comb(5, 2) * math.comb(3, 2)

    def test_cycle6_cardinality_matches_candidate_count(self):
        assert typical_class(cycle_object(3)).cardinality(3, 3) == 6

    def test_too_short(self):
        with pytest.raises(ValidationError):
            cycle_object(1)


class TestConcatenatedCycles:
    def test_three_one_three_shape(self):
        obj = concatenated_cycles("3-1-3")
        assert (len(obj.vns), len(obj.cns), len(obj.edges)) == (6, 7, 14)
        assert obj.basis_size == 2

    @pytest.mark.parametrize(
        "kind, order",
        [("3-1-3", 4), ("2-1-2", 4), ("2-1-3", 2), ("2-2-2", 12)],
    )
    def test_typical_aut_order(self, kind, order):
        assert typical_class(concatenated_cycles(kind)).aut_order == order

    @pytest.mark.parametrize("kind", CONCATENATED_KINDS)
    def test_catalog_builds(self, kind):
        obj = concatenated_cycles(kind)
        assert obj.name == kind
        assert obj.to_networkx().number_of_edges() == len(obj.edges)

    @pytest.mark.parametrize("kind", ["3-1", "4-1-3", "a-b-c"])
    def test_bad_kind(self, kind):
        with pytest.raises(ValidationError):
            concatenated_cycles(kind)


class TestFromCycles:
    def test_rejects_odd_sequence(self):
        with pytest.raises(ValidationError):
            ObjectGraph.from_cycles([["v1", "c1", "v2"]])

    def test_two_cycles_sharing_an_edge(self):
        obj = ObjectGraph.from_cycles(
            [["v1", "c1", "v2", "c2"], ["v1", "c1", "v3", "c3"]], name="theta"
        )
        assert obj.basis_size == 2
        assert len(obj.edges) == 7


class TestPrototypeClasses:
    def test_two_one_two_in_four_by_four(self):
        classes = enumerate_prototype_classes(concatenated_cycles("2-1-2"), 4, 4)
        summary = {
            (
                cls.vn_classes,
                cls.cn_classes,
                cls.aut_order,
                len(edge_class_monomials(concatenated_cycles("2-1-2"), cls)),
            )
            for cls in classes
        }
        assert summary == {(3, 3, 4, 8), (4, 3, 4, 10), (3, 4, 2, 9), (4, 4, 2, 10)}

    def test_two_one_two_with_three_rows(self):
        classes = enumerate_prototype_classes(concatenated_cycles("2-1-2"), 3, 4)
        assert len(classes) == 2
        assert all(cls.aut_order == 4 for cls in classes)

    def test_cycle_classes_include_typical(self):
        classes = enumerate_prototype_classes(cycle_object(4), 4, 4)
        shapes = {(cls.vn_classes, cls.cn_classes, cls.aut_order) for cls in classes}
        assert (4, 4, 8) in shapes
        assert len(classes) > 1

    def test_typical_monomials_are_incidence_rows(self):
        obj = cycle_object(2)
        monomials = edge_class_monomials(obj, typical_class(obj))
        assert sorted(monomials) == [(-1,), (-1,), (1,), (1,)]
