"""Tests for laurent.py: univariate and multivariate Laurent polynomial arithmetic."""
from __future__ import annotations

from itertools import product

import numpy as np
import pytest

from grade_ao.errors import BasisMismatch, LengthMismatch, ValidationError, ZeroScale
from grade_ao.laurent import (
    LaurentPoly,
    MultiLaurent,
    coupling_poly,
    lp_coeff,
    lp_compose,
    lp_mul,
    ml_constant_term,
    ml_from_factor,
    ml_from_monomials,
    ml_mul,
)
from grade_ao.schema import EdgeDistribution


@pytest.fixture()
def f() -> LaurentPoly:
    """(2 + X + 2X^2) / 5."""
    return coupling_poly((0, 1, 2), (0.4, 0.2, 0.4))


# ---------------------------------------------------------------------------
# coupling_poly
# ---------------------------------------------------------------------------

class TestCouplingPoly:
    def test_terms(self, f):
        assert f.terms == pytest.approx({0: 0.4, 1: 0.2, 2: 0.4})
        assert f.total() == pytest.approx(1.0)

    def test_sparse_pattern_leaves_gaps(self):
        g = coupling_poly((0, 1, 4), EdgeDistribution((0.5, 0.25, 0.25)))
        assert g.low == 0 and g.high == 4
        assert g.coeff(2) == 0.0
        assert g.coeff(4) == 0.25

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            coupling_poly((0, 1, 2), (0.5, 0.5))


# ---------------------------------------------------------------------------
# lp_compose / lp_mul / lp_coeff
# ---------------------------------------------------------------------------

class TestUnivariate:
    def test_reflection(self, f):
        reflected = lp_compose(f, -1)
        assert reflected.terms == pytest.approx({-2: 0.4, -1: 0.2, 0: 0.4})

    def test_scaling(self, f):
        assert f.compose(3).terms == pytest.approx({0: 0.4, 3: 0.2, 6: 0.4})
        assert lp_compose(f, -2).low == -4

    def test_zero_scale(self, f):
        with pytest.raises(ZeroScale):
            lp_compose(f, 0)

    def test_cube_product_coefficients(self, f):
        fbar = lp_compose(f, -1)
        product = lp_mul([f, f, f, fbar, fbar, fbar])
        assert lp_coeff(product, 0) == pytest.approx(2841 / 15625, abs=1e-12)
        assert lp_coeff(product, 6) == pytest.approx(0.4**6, abs=1e-12)
        assert lp_coeff(product, 7) == 0.0
        assert product.total() == pytest.approx(1.0)

    def test_constant_of_f_fbar_is_sum_of_squares(self):
        probs = np.array([0.3, 0.1, 0.25, 0.35])
        g = coupling_poly((0, 2, 3, 7), probs)
        assert lp_coeff(g * lp_compose(g, -1), 0) == pytest.approx(np.sum(probs**2))

    def test_empty_product_rejected(self):
        with pytest.raises(ValidationError):
            lp_mul([])

    def test_from_terms_drops_zeros(self):
        g = LaurentPoly.from_terms({-3: 0.0, -1: 2.0, 2: 1.0})
        assert g.low == -1 and g.high == 2
        assert LaurentPoly.from_terms({}).coeffs.size == 0


# ---------------------------------------------------------------------------
# MultiLaurent
# ---------------------------------------------------------------------------

class TestMultivariate:
    def test_from_factor_places_terms_on_direction(self, f):
        h = ml_from_factor((1, -1), f)
        assert h.nvars == 2
        assert h.coeff((2, -2)) == pytest.approx(0.4)
        assert h.coeff((1, -1)) == pytest.approx(0.2)
        assert h.coeff((1, 1)) == 0.0

    def test_product_matches_univariate_on_one_variable(self, f):
        one_var = ml_mul(ml_from_factor((1,), f), ml_from_factor((-1,), f))
        assert ml_constant_term(one_var) == pytest.approx(lp_coeff(f * f.compose(-1), 0))

    def test_monomials_with_zero_vector_contribute_total(self, f):
        h = ml_from_monomials([(0, 0), (1, 0), (-1, 0)], f)
        expected = lp_coeff(f * f.compose(-1), 0)
        assert h.constant_term() == pytest.approx(expected)

    def test_basis_mismatch(self, f):
        with pytest.raises(BasisMismatch):
            ml_mul(ml_from_factor((1,), f), ml_from_factor((1, 1), f))
        with pytest.raises(BasisMismatch):
            MultiLaurent.one(2).coeff((0,))

    def test_one_is_identity(self, f):
        h = ml_from_factor((1, 2), f)
        assert (MultiLaurent.one(2) * h).terms == pytest.approx(h.terms)


# ---------------------------------------------------------------------------
# Algebraic properties and object polynomials
# ---------------------------------------------------------------------------

NON_ELEMENTARY = [
    (1, -1, 0), (0, 1, -1), (-1, 0, 1), (1, 0, 1), (-1, 1, 0), (0, -1, -1),
    (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1),
]
ABSORBING_SET_6_6 = [
    (0, -1, 2, -1), (1, 1, -1, 0), (1, 0, -1, 1), (-1, 0, 1, 1), (1, -1, 0, 0),
    (-1, 1, 0, 0), (-1, 0, 1, 0), (-1, 0, 1, 0), (1, 0, 0, -1), (0, -1, 0, -1),
    (0, 0, -1, 1), (-1, 0, 0, 0), (0, 1, 0, 0), (0, 0, -1, 0),
]


def _random_poly(rng: np.random.Generator) -> LaurentPoly:
    return LaurentPoly(int(rng.integers(-4, 5)), rng.uniform(-1, 1, size=rng.integers(1, 6)))


def _same(left: LaurentPoly, right: LaurentPoly) -> bool:
    return left.low == right.low and np.allclose(left.coeffs, right.coeffs, atol=1e-12)


def _enumerated_constant_term(monomials, pattern, probs) -> float:
    """Total probability of the entry assignments that zero every variable's exponent."""
    directions = np.asarray(monomials)
    total = 0.0
    for choice in product(range(len(pattern)), repeat=len(monomials)):
        values = np.asarray([pattern[k] for k in choice])
        if not np.any(values @ directions):
            total += float(np.prod([probs[k] for k in choice]))
    return total


class TestAlgebraicProperties:
    def test_product_commutes(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a, b = _random_poly(rng), _random_poly(rng)
            assert _same(lp_mul([a, b]), lp_mul([b, a]))

    def test_product_associates(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            a, b, c = _random_poly(rng), _random_poly(rng), _random_poly(rng)
            assert _same(lp_mul([lp_mul([a, b]), c]), lp_mul([a, lp_mul([b, c])]))
            assert _same(lp_mul([a, b, c]), lp_mul([a, lp_mul([b, c])]))

    @pytest.mark.parametrize("monomials", [NON_ELEMENTARY, ABSORBING_SET_6_6])
    def test_constant_term_is_a_probability(self, monomials):
        rng = np.random.default_rng(len(monomials))
        for size in (2, 3, 5):
            pattern = tuple(sorted(rng.choice(8, size=size, replace=False).tolist()))
            for probs in rng.dirichlet(np.ones(size), size=10):
                h = ml_from_monomials(monomials, coupling_poly(pattern, probs))
                assert -1e-12 <= ml_constant_term(h) <= 1 + 1e-12


class TestObjectPolynomials:
    @pytest.mark.parametrize(
        "pattern, probs, expected",
        [((0, 1), (0.6, 0.4), 0.032418500608), ((0, 1, 2), (0.4, 0.2, 0.4), 0.006011490304)],
    )
    def test_non_elementary_prototype(self, pattern, probs, expected):
        h = ml_from_monomials(NON_ELEMENTARY, coupling_poly(pattern, probs))
        assert h.nvars == 3
        assert ml_constant_term(h) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize(
        "pattern, probs, expected",
        [((0, 1), (0.6, 0.4), 0.00844942098432), ((0, 1, 2), (0.4, 0.2, 0.4), 0.00089257672704)],
    )
    def test_absorbing_set_prototype(self, pattern, probs, expected):
        h = ml_from_monomials(ABSORBING_SET_6_6, coupling_poly(pattern, probs))
        assert h.nvars == 4
        assert ml_constant_term(h) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("monomials", [NON_ELEMENTARY, ABSORBING_SET_6_6])
    def test_constant_term_matches_enumeration(self, monomials):
        pattern, probs = (0, 2), (0.7, 0.3)
        h = ml_from_monomials(monomials, coupling_poly(pattern, probs))
        expected = _enumerated_constant_term(monomials, pattern, probs)
        assert ml_constant_term(h) == pytest.approx(expected, abs=1e-12)
