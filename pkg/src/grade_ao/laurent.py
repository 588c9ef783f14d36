"""Laurent-polynomial arithmetic behind every probability metric.

Polynomials are stored densely: a coefficient array plus the exponent of its first slot
(one offset per variable for the multivariate case). Products are exact convolutions; only
the sparse ``terms`` view drops coefficients below ``PRUNE``.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import reduce
from typing import Any

import numpy as np

from .errors import BasisMismatch, LengthMismatch, ValidationError, ZeroScale
from .schema import EdgeDistribution

PRUNE = 1e-15


@dataclass(frozen=True, slots=True, eq=False)
class LaurentPoly:
    """Univariate Laurent polynomial; ``coeffs[k]`` multiplies X^(low + k)."""

    low: int
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=float).ravel()
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "low", int(self.low))

    @classmethod
    def from_terms(cls, terms: Mapping[int, float]) -> LaurentPoly:
        kept = {int(exp): float(c) for exp, c in terms.items() if c != 0.0}
        if not kept:
            return cls(0, np.zeros(0))
        low, high = min(kept), max(kept)
        coeffs = np.zeros(high - low + 1)
        for exp, c in kept.items():
            coeffs[exp - low] += c
        return cls(low, coeffs)

    @classmethod
    def constant(cls, value: float = 1.0) -> LaurentPoly:
        return cls(0, np.asarray([float(value)]))

    @property
    def high(self) -> int:
        return self.low + self.coeffs.size - 1

    @property
    def terms(self) -> dict[int, float]:
        """Sparse view: exponent -> coefficient, magnitudes below PRUNE omitted."""
        return {
            self.low + int(k): float(self.coeffs[k])
            for k in np.flatnonzero(np.abs(self.coeffs) >= PRUNE)
        }

    def coeff(self, exponent: int) -> float:
        index = exponent - self.low
        if 0 <= index < self.coeffs.size:
            return float(self.coeffs[index])
        return 0.0

    def total(self) -> float:
        return float(self.coeffs.sum())

    def compose(self, scale: int) -> LaurentPoly:
        return lp_compose(self, scale)

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        return lp_mul([self, other])

    def __repr__(self) -> str:
        body = " + ".join(f"{c:.6g}*X^{exp}" for exp, c in sorted(self.terms.items()))
        return f"LaurentPoly({body or '0'})"


def coupling_poly(pattern: Sequence[int], p: EdgeDistribution | Sequence[float]) -> LaurentPoly:
    """f(X; a, p) = sum_i p_i X^(a_i).

    Raises:
        LengthMismatch: If pattern and distribution lengths differ.
    """
    probs = p.as_array() if isinstance(p, EdgeDistribution) else np.asarray(p, dtype=float)
    if len(pattern) != probs.size:
        raise LengthMismatch(f"pattern has {len(pattern)} entries, distribution {probs.size}")
    low = int(min(pattern))
    coeffs = np.zeros(int(max(pattern)) - low + 1)
    np.add.at(coeffs, np.asarray(pattern, dtype=np.int64) - low, probs)
    return LaurentPoly(low, coeffs)


def lp_compose(f: LaurentPoly, scale: int) -> LaurentPoly:
    """Substitute X -> X^scale."""
    if scale == 0:
        raise ZeroScale("cannot substitute X -> X^0")
    if f.coeffs.size == 0:
        return f
    step = abs(scale)
    spread = np.zeros((f.coeffs.size - 1) * step + 1)
    spread[::step] = f.coeffs
    if scale > 0:
        return LaurentPoly(f.low * scale, spread)
    return LaurentPoly(f.high * scale, spread[::-1].copy())


def lp_mul(fs: Iterable[LaurentPoly]) -> LaurentPoly:
    """Exact product of a non-empty sequence of polynomials."""
    factors = list(fs)
    if not factors:
        raise ValidationError("lp_mul needs at least one factor")

    def _pair(left: LaurentPoly, right: LaurentPoly) -> LaurentPoly:
        if left.coeffs.size == 0 or right.coeffs.size == 0:
            return LaurentPoly(0, np.zeros(0))
        return LaurentPoly(left.low + right.low, np.convolve(left.coeffs, right.coeffs))

    return reduce(_pair, factors)


def lp_coeff(f: LaurentPoly, exponent: int) -> float:
    """[f]_k; zero for exponents outside the stored range."""
    return f.coeff(exponent)


@dataclass(frozen=True, slots=True, eq=False)
class MultiLaurent:
    """Multivariate Laurent polynomial over one variable per fundamental cycle.

    ``coeffs`` has one axis per variable; ``coeffs[idx]`` multiplies X^(low + idx).
    """

    low: tuple[int, ...]
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=float)
        low = tuple(int(v) for v in self.low)
        if coeffs.ndim != len(low):
            raise BasisMismatch(f"{coeffs.ndim}-d coefficients with {len(low)} offsets")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "low", low)

    @classmethod
    def one(cls, nvars: int) -> MultiLaurent:
        return cls((0,) * nvars, np.ones((1,) * nvars))

    @property
    def nvars(self) -> int:
        return len(self.low)

    @property
    def terms(self) -> dict[tuple[int, ...], float]:
        """Sparse view: exponent vector -> coefficient, magnitudes below PRUNE omitted."""
        offset = np.asarray(self.low)
        return {
            tuple(int(v) for v in offset + idx): float(self.coeffs[tuple(idx)])
            for idx in np.argwhere(np.abs(self.coeffs) >= PRUNE)
        }

    def coeff(self, exponents: Sequence[int]) -> float:
        if len(exponents) != self.nvars:
            raise BasisMismatch(f"expected {self.nvars} exponents, got {len(exponents)}")
        index = tuple(int(e) - lo for e, lo in zip(exponents, self.low))
        if all(0 <= i < n for i, n in zip(index, self.coeffs.shape)):
            return float(self.coeffs[index])
        return 0.0

    def constant_term(self) -> float:
        return self.coeff((0,) * self.nvars)

    def __mul__(self, other: MultiLaurent) -> MultiLaurent:
        return ml_mul(self, other)


def ml_from_factor(exps: Sequence[int], f: LaurentPoly) -> MultiLaurent:
    """Map term p_i X^(a_i) of ``f`` to coefficient p_i at exponent vector a_i * exps."""
    direction = np.asarray(exps, dtype=np.int64)
    support = np.flatnonzero(f.coeffs)
    if support.size == 0:
        return MultiLaurent((0,) * direction.size, np.zeros((0,) * direction.size))
    vectors = np.outer(support + f.low, direction)
    low = vectors.min(axis=0)
    shape = tuple(int(v) for v in vectors.max(axis=0) - low + 1)
    coeffs = np.zeros(shape)
    np.add.at(coeffs, tuple((vectors - low).T), f.coeffs[support])
    return MultiLaurent(tuple(int(v) for v in low), coeffs)


def ml_mul(left: MultiLaurent, right: MultiLaurent) -> MultiLaurent:
    """Exact product; the operand with fewer non-zero terms is shifted and accumulated.

    Raises:
        BasisMismatch: If the operands have different numbers of variables.
    """
    if left.nvars != right.nvars:
        raise BasisMismatch(f"cannot multiply {left.nvars}- and {right.nvars}-variable polys")
    if left.coeffs.size == 0 or right.coeffs.size == 0:
        return MultiLaurent((0,) * left.nvars, np.zeros((0,) * left.nvars))
    if np.count_nonzero(left.coeffs) > np.count_nonzero(right.coeffs):
        left, right = right, left
    shape = tuple(a + b - 1 for a, b in zip(left.coeffs.shape, right.coeffs.shape))
    product = np.zeros(shape)
    span = right.coeffs.shape
    for idx in np.argwhere(left.coeffs != 0.0):
        window = tuple(slice(int(i), int(i) + n) for i, n in zip(idx, span))
        product[window] += left.coeffs[tuple(idx)] * right.coeffs
    low = tuple(a + b for a, b in zip(left.low, right.low))
    return MultiLaurent(low, product)


def ml_constant_term(h: MultiLaurent) -> float:
    return h.constant_term()


def ml_from_monomials(monomials: Iterable[Sequence[int]], f: LaurentPoly) -> MultiLaurent:
    """Product of f(X^u) over explicit exponent vectors u (a matrix-representation polynomial).

    All-zero vectors contribute f(1), the sum of the coefficients.
    """
    vectors = [tuple(int(v) for v in u) for u in monomials]
    if not vectors:
        raise ValidationError("ml_from_monomials needs at least one monomial")
    nvars = len(vectors[0])
    if any(len(u) != nvars for u in vectors):
        raise BasisMismatch("monomials have different numbers of variables")
    return reduce(ml_mul, (ml_from_factor(u, f) for u in vectors), MultiLaurent.one(nvars))


def as_probabilities(p: Any) -> np.ndarray:
    """Accept an EdgeDistribution or any float sequence."""
    if isinstance(p, EdgeDistribution):
        return p.as_array()
    return np.asarray(p, dtype=float)
