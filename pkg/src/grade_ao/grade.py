"""Probability metrics, their gradients, and the gradient-descent distributor (GRADE).

Every metric is the constant term of a product of coupling-polynomial factors f(X^u).
``MonomialProduct`` evaluates such products and their p-gradients; cycle metrics are the
one-variable case, object metrics use one variable per fundamental cycle.
"""
from __future__ import annotations

import logging
import math
from collections import Counter
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import reduce
from itertools import combinations
from typing import Protocol

import numpy as np

from .errors import BadStructure, DistributionError, Infeasible, NoConvergence, ValidationError
from .laurent import (
    MultiLaurent,
    as_probabilities,
    coupling_poly,
    lp_compose,
    lp_mul,
    ml_from_factor,
    ml_mul,
)
from .model import validate_params
from .objects import (
    ObjectGraph,
    PrototypeClass,
    edge_class_monomials,
    enumerate_prototype_classes,
)
from .schema import (
    CodeParams,
    CycleWeights,
    EdgeDistribution,
    GradeConfig,
    GradeResult,
    PatternSearchResult,
)

logger = logging.getLogger(__name__)

DistributionLike = EdgeDistribution | Sequence[float] | np.ndarray


@dataclass(frozen=True, slots=True)
class MonomialProduct:
    """Product over k of f(X^(u_k))^(n_k) for distinct exponent vectors u_k."""

    monomials: tuple[tuple[int, ...], ...]
    powers: tuple[int, ...]

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence[int]]) -> MonomialProduct:
        counts = Counter(tuple(int(v) for v in vector) for vector in vectors)
        if not counts:
            raise ValidationError("a monomial product needs at least one factor")
        ordered = sorted(counts)
        return cls(tuple(ordered), tuple(counts[u] for u in ordered))

    @property
    def nvars(self) -> int:
        return len(self.monomials[0])

    @property
    def factor_count(self) -> int:
        return sum(self.powers)

    def _factors(self, pattern: Sequence[int], p: DistributionLike) -> list[MultiLaurent]:
        f = coupling_poly(pattern, as_probabilities(p))
        return [ml_from_factor(u, f) for u in self.monomials]

    def polynomial(self, pattern: Sequence[int], p: DistributionLike) -> MultiLaurent:
        factors = self._factors(pattern, p)
        product = MultiLaurent.one(self.nvars)
        for factor, power in zip(factors, self.powers):
            for _ in range(power):
                product = ml_mul(product, factor)
        return product

    def value(self, pattern: Sequence[int], p: DistributionLike) -> float:
        return self.polynomial(pattern, p).constant_term()

    def gradient(self, pattern: Sequence[int], p: DistributionLike) -> np.ndarray:
        """d/dp_t of the constant term: sum_k n_k [X^(a_t u_k) * product without one f(X^u_k)]_0."""
        factors = self._factors(pattern, p)
        exponents = np.asarray(pattern, dtype=np.int64)
        grad = np.zeros(exponents.size)
        for k, (u, power) in enumerate(zip(self.monomials, self.powers)):
            rest = MultiLaurent.one(self.nvars)
            for j, (factor, n) in enumerate(zip(factors, self.powers)):
                for _ in range(n - 1 if j == k else n):
                    rest = ml_mul(rest, factor)
            direction = np.asarray(u, dtype=np.int64)
            for t, a_t in enumerate(exponents):
                grad[t] += power * rest.coeff(tuple(int(v) for v in -a_t * direction))
        return grad


# ---------------------------------------------------------------------------
# Cycle metrics
# ---------------------------------------------------------------------------

CYCLE4 = MonomialProduct(((-1,), (1,)), (2, 2))
CYCLE6 = MonomialProduct(((-1,), (1,)), (3, 3))
CYCLE8_STRUCTURES: dict[int, MonomialProduct] = {
    1: CYCLE4,
    2: MonomialProduct(((-2,), (-1,), (1,), (2,)), (1, 2, 2, 1)),
    3: MonomialProduct(((-1,), (1,), (2,)), (4, 2, 1)),
    4: MonomialProduct(((-1,), (1,)), (4, 4)),
}
CYCLE8_STRUCTURES[5] = CYCLE8_STRUCTURES[4]
CYCLE8_STRUCTURES[6] = CYCLE8_STRUCTURES[4]


def _bracket(pattern: Sequence[int], p: DistributionLike, plus: int, minus: int) -> float:
    f = coupling_poly(pattern, as_probabilities(p))
    return lp_mul([f] * plus + [lp_compose(f, -1)] * minus).coeff(0)


def p4(pattern: Sequence[int], p: DistributionLike) -> float:
    """Probability that a cycle-4 candidate is active: [f^2(X) f^2(X^-1)]_0."""
    return _bracket(pattern, p, 2, 2)


def p6(pattern: Sequence[int], p: DistributionLike) -> float:
    """Probability that a cycle-6 candidate is active: [f^3(X) f^3(X^-1)]_0."""
    return _bracket(pattern, p, 3, 3)


def p8_structure(pattern: Sequence[int], p: DistributionLike, structure: int) -> float:
    """Activation probability of a cycle-8 candidate spanning structure S1..S6.

    Raises:
        BadStructure: If ``structure`` is not in 1..6.
    """
    if structure not in CYCLE8_STRUCTURES:
        raise BadStructure(f"cycle-8 structure must be 1..6, got {structure}")
    f = coupling_poly(pattern, as_probabilities(p))
    fbar = lp_compose(f, -1)
    if structure == 1:
        factors = [f, f, fbar, fbar]
    elif structure == 2:
        factors = [lp_compose(f, 2), lp_compose(f, -2), f, f, fbar, fbar]
    elif structure == 3:
        factors = [lp_compose(f, 2), f, f, fbar, fbar, fbar, fbar]
    else:
        factors = [f] * 4 + [fbar] * 4
    return lp_mul(factors).coeff(0)


def cycle6_total(gamma: int, kappa: int) -> int:
    return 6 * math.comb(gamma, 3) * math.comb(kappa, 3)


def cycle8_weights(gamma: int, kappa: int) -> tuple[int, int, int, int]:
    """Candidate totals behind n8: S1, S2, S3, and S4+S5+S6 (which share one probability)."""
    c = math.comb
    w1 = c(gamma, 2) * c(kappa, 2)
    w2 = 3 * c(gamma, 2) * c(kappa, 3) + 3 * c(gamma, 3) * c(kappa, 2)
    w3 = 18 * c(gamma, 3) * c(kappa, 3)
    w4 = (
        6 * c(gamma, 2) * c(kappa, 4)
        + 6 * c(gamma, 4) * c(kappa, 2)
        + 36 * c(gamma, 3) * c(kappa, 4)
        + 36 * c(gamma, 4) * c(kappa, 3)
        + 72 * c(gamma, 4) * c(kappa, 4)
    )
    return w1, w2, w3, w4


def n4(pattern: Sequence[int], p: DistributionLike, gamma: int, kappa: int) -> float:
    return math.comb(gamma, 2) * math.comb(kappa, 2) * p4(pattern, p)


def n6(pattern: Sequence[int], p: DistributionLike, gamma: int, kappa: int) -> float:
    """Expected number of active cycle-6 candidates."""
    return cycle6_total(gamma, kappa) * p6(pattern, p)


def n8(pattern: Sequence[int], p: DistributionLike, gamma: int, kappa: int) -> float:
    """Expected number of active cycle-8 candidates."""
    weights = cycle8_weights(gamma, kappa)
    return sum(w * p8_structure(pattern, p, s) for w, s in zip(weights, (1, 2, 3, 4)))


def cycle_objective(
    pattern: Sequence[int],
    p: DistributionLike,
    gamma: int,
    kappa: int,
    weights: CycleWeights = CycleWeights(),
) -> float:
    """(w6 * n6 + w8 * n8) / C(gamma,2)C(kappa,2), the value GRADE minimizes for cycles."""
    return make_cycle_objective(tuple(pattern), gamma, kappa, weights).value(as_probabilities(p))


def grad_cycle_objective(
    pattern: Sequence[int],
    p: DistributionLike,
    gamma: int,
    kappa: int,
    weights: CycleWeights = CycleWeights(),
) -> np.ndarray:
    """Mean-centered gradient of ``cycle_objective`` with respect to p."""
    grad = make_cycle_objective(tuple(pattern), gamma, kappa, weights).gradient(as_probabilities(p))
    return grad - grad.mean()


# ---------------------------------------------------------------------------
# Object metrics
# ---------------------------------------------------------------------------

def class_product(graph: ObjectGraph, cls: PrototypeClass) -> MonomialProduct:
    return MonomialProduct.from_vectors(edge_class_monomials(graph, cls))


def typical_product(graph: ObjectGraph) -> MonomialProduct:
    """Factors of the typical assignment: every edge on its own base-matrix entry."""
    return MonomialProduct.from_vectors(graph.incidence)


def characteristic_poly_prototype(
    graph: ObjectGraph,
    cls: PrototypeClass,
    pattern: Sequence[int],
    p: DistributionLike,
) -> MultiLaurent:
    """Product over edge classes of f(prod_s X_s^(sum of signs)); its constant term is the
    activation probability of any prototype in ``cls``."""
    f = coupling_poly(pattern, as_probabilities(p))
    factors = [ml_from_factor(u, f) for u in edge_class_monomials(graph, cls)]
    return reduce(ml_mul, factors, MultiLaurent.one(graph.basis_size))


def object_probability(
    graph: ObjectGraph,
    cls: PrototypeClass,
    pattern: Sequence[int],
    p: DistributionLike,
) -> float:
    return characteristic_poly_prototype(graph, cls, pattern, p).constant_term()


def typical_probability(graph: ObjectGraph, pattern: Sequence[int], p: DistributionLike) -> float:
    return typical_product(graph).value(pattern, p)


def expected_object_count(
    graph: ObjectGraph,
    gamma: int,
    kappa: int,
    pattern: Sequence[int],
    p: DistributionLike,
) -> float:
    """Sum over prototype classes of (number of prototypes) x (activation probability)."""
    return sum(
        cls.cardinality(gamma, kappa) * class_product(graph, cls).value(pattern, p)
        for cls in enumerate_prototype_classes(graph, gamma, kappa)
    )


def grad_object_probability(
    graph: ObjectGraph,
    cls: PrototypeClass,
    pattern: Sequence[int],
    p: DistributionLike,
) -> np.ndarray:
    """Raw (not mean-centered) gradient of ``object_probability`` with respect to p."""
    return class_product(graph, cls).gradient(pattern, p)


def grad_expected_object_count(
    graph: ObjectGraph,
    gamma: int,
    kappa: int,
    pattern: Sequence[int],
    p: DistributionLike,
) -> np.ndarray:
    return sum(
        cls.cardinality(gamma, kappa) * class_product(graph, cls).gradient(pattern, p)
        for cls in enumerate_prototype_classes(graph, gamma, kappa)
    )


# ---------------------------------------------------------------------------
# Objectives and descent
# ---------------------------------------------------------------------------

class Objective(Protocol):
    def value(self, p: np.ndarray) -> float: ...

    def gradient(self, p: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, slots=True)
class WeightedProducts:
    """Objective sum_k c_k [product_k]_0 over a fixed coupling pattern."""

    pattern: tuple[int, ...]
    terms: tuple[tuple[float, MonomialProduct], ...]

    def value(self, p: np.ndarray) -> float:
        return sum(c * product.value(self.pattern, p) for c, product in self.terms if c)

    def gradient(self, p: np.ndarray) -> np.ndarray:
        grad = np.zeros(len(self.pattern))
        for c, product in self.terms:
            if c:
                grad += c * product.gradient(self.pattern, p)
        return grad


def make_cycle_objective(
    pattern: tuple[int, ...],
    gamma: int,
    kappa: int,
    weights: CycleWeights,
) -> WeightedProducts:
    """Cycle objective as weighted products, normalized by the S1 candidate total."""
    w1, w2, w3, w4 = cycle8_weights(gamma, kappa)
    scale = 1.0 / w1
    terms = [
        (weights.cycle6 * cycle6_total(gamma, kappa) * scale, CYCLE6),
        (weights.cycle8 * w1 * scale, CYCLE8_STRUCTURES[1]),
        (weights.cycle8 * w2 * scale, CYCLE8_STRUCTURES[2]),
        (weights.cycle8 * w3 * scale, CYCLE8_STRUCTURES[3]),
        (weights.cycle8 * w4 * scale, CYCLE8_STRUCTURES[4]),
    ]
    return WeightedProducts(pattern, tuple(terms))


def make_objects_objective(
    pattern: tuple[int, ...],
    objects: Sequence[tuple[ObjectGraph, float]],
    gamma: int,
    kappa: int,
    typical_only: bool = True,
) -> WeightedProducts:
    """Weighted typical probabilities, or weighted expected counts over every class."""
    terms: list[tuple[float, MonomialProduct]] = []
    for graph, weight in objects:
        if typical_only:
            terms.append((float(weight), typical_product(graph)))
            continue
        for cls in enumerate_prototype_classes(graph, gamma, kappa):
            terms.append((float(weight) * cls.cardinality(gamma, kappa), class_product(graph, cls)))
    return WeightedProducts(pattern, tuple(terms))


def project_to_simplex(p: np.ndarray, floor: float) -> np.ndarray:
    """Clamp entries below ``floor`` up to it and renormalize."""
    clipped = np.maximum(p, floor)
    return clipped / clipped.sum()


def validate_config(config: GradeConfig, size: int) -> GradeConfig:
    if config.step <= 0 or config.tol <= 0 or config.max_iters < 1 or config.floor <= 0:
        raise ValidationError("step, tol, max_iters and floor must all be positive")
    if size > 1 and config.floor >= 1.0 / size:
        raise DistributionError(f"floor {config.floor} must be below 1/{size}")
    if not 0 < config.shrink <= 1:
        raise ValidationError(f"shrink must be in (0, 1], got {config.shrink}")
    return config


def descend(objective: Objective, size: int, config: GradeConfig = GradeConfig()) -> GradeResult:
    """Normalized-gradient descent on the simplex from the uniform distribution.

    Each step moves p by ``step`` along the mean-centered gradient direction and projects
    back to the floored simplex. Stops when successive objective values differ by at most
    ``tol``. With ``backtrack`` an objective-increasing step is discarded and the step size
    shrinks; otherwise every step is taken and the best iterate is returned.
    """
    validate_config(config, size)
    p = np.full(size, 1.0 / size)
    value = objective.value(p)
    initial = value
    best_p, best_value = p, value
    trace = [value]
    step = config.step
    converged = False
    iters = 0

    while iters < config.max_iters:
        iters += 1
        grad = objective.gradient(p)
        grad = grad - grad.mean()
        norm = float(np.linalg.norm(grad))
        if norm == 0.0 or not np.isfinite(norm):
            converged = True
            break
        candidate = project_to_simplex(p - step * grad / norm, config.floor)
        candidate_value = objective.value(candidate)

        if config.backtrack and candidate_value > value:
            step *= config.shrink
            if step < 1e-15:
                converged = True
                break
            continue

        change = abs(value - candidate_value)
        p, value = candidate, candidate_value
        trace.append(value)
        if value <= best_value:
            best_p, best_value = p, value
        if change <= config.tol:
            converged = True
            break
        if iters % 1000 == 0:
            logger.debug("iteration %d: objective %.12g, step %.3g", iters, value, step)

    logger.info(
        "GRADE %s after %d iterations: %.10g -> %.10g",
        "converged" if converged else "stopped",
        iters,
        initial,
        best_value,
    )
    return GradeResult(
        distribution=EdgeDistribution.from_array(best_p),
        objective_initial=initial,
        objective_final=best_value,
        iters=iters,
        converged=converged,
        trace=trace,
    )


def _finish(result: GradeResult, strict: bool) -> GradeResult:
    if strict and not result.converged:
        raise NoConvergence(result)
    return result


def grade_cycles(
    params: CodeParams,
    config: GradeConfig = GradeConfig(),
    weights: CycleWeights = CycleWeights(),
    strict: bool = False,
) -> GradeResult:
    """Locally optimal edge distribution for the weighted cycle-6/cycle-8 objective.

    Raises:
        NoConvergence: Only when ``strict`` and the iteration cap was hit.
    """
    validate_params(params)
    objective = make_cycle_objective(params.pattern, params.gamma, params.kappa, weights)
    return _finish(descend(objective, len(params.pattern), config), strict)


def grade_objects(
    objects: Sequence[tuple[ObjectGraph, float]],
    params: CodeParams,
    config: GradeConfig = GradeConfig(),
    typical_only: bool = True,
    strict: bool = False,
) -> GradeResult:
    """Locally optimal edge distribution for a weighted set of objects.

    Raises:
        ValidationError: If ``objects`` is empty.
        NoConvergence: Only when ``strict`` and the iteration cap was hit.
    """
    if not objects:
        raise ValidationError("grade_objects needs at least one object")
    validate_params(params)
    objective = make_objects_objective(
        params.pattern, objects, params.gamma, params.kappa, typical_only=typical_only
    )
    return _finish(descend(objective, len(params.pattern), config), strict)


# ---------------------------------------------------------------------------
# Coupling-pattern search
# ---------------------------------------------------------------------------

PatternEvaluator = Callable[[tuple[int, ...]], GradeResult]


def coupling_patterns(memory: int, pseudo_memory: int) -> list[tuple[int, ...]]:
    """Every pattern (0, ..., m) with m_t + 1 entries, in lexicographic order.

    Raises:
        Infeasible: If m_t > m, or m_t = 0 with m > 0.
    """
    if pseudo_memory > memory or pseudo_memory < 0 or (pseudo_memory == 0 and memory > 0):
        raise Infeasible(f"no coupling pattern with m={memory}, m_t={pseudo_memory}")
    if pseudo_memory == 0:
        return [(0,)]
    return [
        (0, *inner, memory) for inner in combinations(range(1, memory), pseudo_memory - 1)
    ]


def cycle_pattern_evaluator(
    gamma: int,
    kappa: int,
    weights: CycleWeights = CycleWeights(),
    config: GradeConfig = GradeConfig(),
) -> PatternEvaluator:
    def evaluate(pattern: tuple[int, ...]) -> GradeResult:
        objective = make_cycle_objective(pattern, gamma, kappa, weights)
        return descend(objective, len(pattern), config)

    return evaluate


def object_pattern_evaluator(
    objects: Sequence[tuple[ObjectGraph, float]],
    gamma: int,
    kappa: int,
    config: GradeConfig = GradeConfig(),
    typical_only: bool = True,
) -> PatternEvaluator:
    def evaluate(pattern: tuple[int, ...]) -> GradeResult:
        objective = make_objects_objective(pattern, objects, gamma, kappa, typical_only)
        return descend(objective, len(pattern), config)

    return evaluate


def find_optimal_coupling_pattern(
    memory: int,
    pseudo_memory: int,
    evaluate: PatternEvaluator,
    max_workers: int = 1,
    rel_tol: float = 1e-9,
) -> PatternSearchResult:
    """Run GRADE on every admissible pattern and keep the lowest objective.

    Values within ``rel_tol`` of the minimum count as ties; the lexicographically smallest
    tied pattern wins.
    """
    patterns = coupling_patterns(memory, pseudo_memory)
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(evaluate, patterns))
    else:
        results = [evaluate(pattern) for pattern in patterns]

    table = [(pattern, res.objective_final) for pattern, res in zip(patterns, results)]
    lowest = min(value for _, value in table)
    margin = rel_tol * max(abs(lowest), 1e-300)
    winner = next(k for k, (_, value) in enumerate(table) if value <= lowest + margin)
    logger.info("optimal pattern %s with objective %.10g", patterns[winner], table[winner][1])
    return PatternSearchResult(pattern=patterns[winner], result=results[winner], table=table)
