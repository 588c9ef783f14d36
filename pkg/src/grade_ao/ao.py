"""Semi-greedy partitioning optimizers (AO), the restart driver and the exhaustive oracle.

Both optimizers start from a random placement of the discretized edge distribution and
sweep the base-matrix entries, trying every pattern value at each one. A trial value is
accepted when it strictly lowers the weighted count and the deviation ledger still admits
it. Sweeps repeat until a whole pass changes nothing.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from typing import Protocol

import numpy as np

from .errors import TooLarge, ValidationError
from .model import (
    discretize_distribution,
    place_distribution,
    validate_distribution,
    validate_params,
)
from .schema import (
    AoResult,
    CodeParams,
    CycleWeights,
    EdgeDistribution,
    ObjectWeights,
    PartitioningMatrix,
    SearchBudget,
)
from .settings import DEFAULT_SEED
from .topology import (
    combine_path_counts,
    count_objects,
    cycle_entry_index,
    enumerate_cycles,
    enumerate_paths,
    path_entry_indices,
)

logger = logging.getLogger(__name__)

MatrixObjective = Callable[[np.ndarray], float]
Optimizer = Callable[..., AoResult]
EXHAUSTIVE_LIMIT = 10**8


@dataclass(slots=True)
class DeviationLedger:
    """Accepted reassignments per target value, capped by a SearchBudget.

    ``counts[k]`` grows by one every time an entry is moved to pattern value k and never
    decreases, so it bounds how far the value counts drift from the initial placement.
    """

    budget: SearchBudget
    counts: np.ndarray

    @classmethod
    def empty(cls, budget: SearchBudget, size: int) -> DeviationLedger:
        return cls(budget, np.zeros(size, dtype=np.int64))

    def admits(self, index: int) -> bool:
        trial = self.counts.copy()
        trial[index] += 1
        return trial.sum() <= self.budget.d1 and trial.max() <= self.budget.d2

    def record(self, index: int) -> None:
        self.counts[index] += 1


class _Counter(Protocol):
    def value(self) -> float: ...

    def trial(self, entry: int, current: int, values: np.ndarray) -> np.ndarray: ...

    def commit(self, entry: int, current: int, new: int) -> None: ...


class _CycleCounter:
    """Weighted active cycle-6/cycle-8 counts kept current through the per-entry lists."""

    def __init__(self, flat: np.ndarray, params: CodeParams, weights: CycleWeights):
        self.groups = []
        for half_length, weight in ((3, weights.cycle6), (4, weights.cycle8)):
            candidates = enumerate_cycles(params.gamma, params.kappa, half_length)
            if weight == 0 or len(candidates) == 0:
                continue
            index = cycle_entry_index(params.gamma, params.kappa, half_length)
            self.groups.append((float(weight), index, candidates.alternating_sums(flat)))

    def value(self) -> float:
        return float(sum(weight * np.count_nonzero(sums == 0) for weight, _, sums in self.groups))

    def trial(self, entry: int, current: int, values: np.ndarray) -> np.ndarray:
        totals = np.full(values.size, self.value())
        for weight, index, sums in self.groups:
            ids, net = index.lookup(entry)
            local = sums[ids]
            moved = local[None, :] + np.outer(values - current, net)
            totals += weight * ((moved == 0).sum(axis=1) - np.count_nonzero(local == 0))
        return totals

    def commit(self, entry: int, current: int, new: int) -> None:
        for _, index, sums in self.groups:
            ids, net = index.lookup(entry)
            sums[ids] += net * (new - current)


class _ObjectCounter:
    """Weighted protograph object counts from path tables summed over the last row."""

    def __init__(self, flat: np.ndarray, params: CodeParams, weights: ObjectWeights):
        self.weights = weights.as_array()
        self.shape = (params.kappa * (params.kappa - 1) // 2, params.gamma, 6 * params.memory + 1)
        self.size = math.prod(self.shape)
        self.kinds = []
        paths_by_kind = enumerate_paths(params.gamma, params.kappa)
        indices = path_entry_indices(params.gamma, params.kappa)
        for paths, index in zip(paths_by_kind, indices):
            base = (
                (paths.pairs.astype(np.int64) * params.gamma + paths.rows[:, 0]) * self.shape[2]
                + 3 * params.memory
            )
            sums = paths.sums(flat)
            table = np.bincount(base + sums, minlength=self.size)
            self.kinds.append((base, index, sums, table))
        self._value = self._evaluate([table for *_, table in self.kinds])

    def _evaluate(self, tables: Sequence[np.ndarray]) -> float:
        counts = combine_path_counts(*(table.reshape(self.shape) for table in tables))
        return float(self.weights @ [counts.t212, counts.t213, counts.t222, counts.t313])

    def _shifted(self, kind: tuple, ids: np.ndarray, net: np.ndarray, delta: int) -> np.ndarray:
        base, _, sums, table = kind
        old = base[ids] + sums[ids]
        return (
            table
            + np.bincount(old + net * delta, minlength=self.size)
            - np.bincount(old, minlength=self.size)
        )

    def value(self) -> float:
        return self._value

    def trial(self, entry: int, current: int, values: np.ndarray) -> np.ndarray:
        lookups = [index.lookup(entry) for _, index, _, _ in self.kinds]
        totals = np.empty(values.size)
        for k, value in enumerate(values):
            if value == current:
                totals[k] = self._value
                continue
            tables = [
                self._shifted(kind, ids, net, int(value) - current)
                for kind, (ids, net) in zip(self.kinds, lookups)
            ]
            totals[k] = self._evaluate(tables)
        return totals

    def commit(self, entry: int, current: int, new: int) -> None:
        updated = []
        for kind in self.kinds:
            base, index, sums, _ = kind
            ids, net = index.lookup(entry)
            table = self._shifted(kind, ids, net, new - current)
            sums[ids] += net * (new - current)
            updated.append((base, index, sums, table))
        self.kinds = updated
        self._value = self._evaluate([table for *_, table in self.kinds])


def _sweep_to_fixpoint(
    counter: _Counter,
    flat: np.ndarray,
    values: np.ndarray,
    ledger: DeviationLedger,
    best_improvement: bool,
) -> tuple[list[float], int]:
    objective = counter.value()
    trace = [objective]
    moves = 0
    improved = True
    while improved:
        improved = False
        for entry in range(flat.size):
            current = int(flat[entry])
            trials = counter.trial(entry, current, values)
            chosen: int | None = None
            best = objective
            if best_improvement:
                admissible = [
                    k for k in range(values.size) if trials[k] < best and ledger.admits(k)
                ]
                if admissible:
                    chosen = min(admissible, key=lambda k: (trials[k], k))
            else:
                # running improvement: the last value that beat the running best wins
                for k in range(values.size):
                    if trials[k] < best and ledger.admits(k):
                        chosen, best = k, float(trials[k])
            if chosen is not None:
                new = int(values[chosen])
                ledger.record(chosen)
                counter.commit(entry, current, new)
                flat[entry] = new
                objective = counter.value()
                moves += 1
                trace.append(objective)
                improved = True
                logger.debug(
                    "entry %d: %d -> %d, objective %.6g", entry, current, new, objective
                )
    return trace, moves


def initial_partitioning(
    params: CodeParams,
    p: EdgeDistribution,
    seed: int = DEFAULT_SEED,
) -> np.ndarray:
    """Random placement of the value counts closest to ``p`` (the optimizers' starting point)."""
    counts = discretize_distribution(p, params.entry_count)
    return place_distribution(params, counts, np.random.default_rng(seed))


def _run(
    params: CodeParams,
    p: EdgeDistribution,
    budget: SearchBudget | None,
    seed: int,
    best_improvement: bool,
    make_counter: Callable[[np.ndarray], _Counter],
    label: str,
) -> AoResult:
    validate_params(params)
    validate_distribution(p, size=len(params.pattern), allow_zero=True)
    budget = budget or SearchBudget.default_for(params)
    flat = initial_partitioning(params, p, seed).astype(np.int64).ravel()
    counter = make_counter(flat)
    ledger = DeviationLedger.empty(budget, len(params.pattern))
    trace, moves = _sweep_to_fixpoint(counter, flat, params.values(), ledger, best_improvement)
    logger.info(
        "%s AO seed %d: %.6g -> %.6g after %d moves", label, seed, trace[0], trace[-1], moves
    )
    return AoResult(
        matrix=PartitioningMatrix(flat.reshape(params.gamma, params.kappa)),
        objective=counter.value(),
        initial_objective=trace[0],
        trace=trace,
        seed=seed,
        deviation=tuple(int(v) for v in ledger.counts),
        moves=moves,
    )


def ao_cycles(
    params: CodeParams,
    p: EdgeDistribution,
    weights: CycleWeights = CycleWeights(),
    budget: SearchBudget | None = None,
    seed: int = DEFAULT_SEED,
    best_improvement: bool = False,
) -> AoResult:
    """Cycle-based optimizer: minimize w * (active cycle-6) + (active cycle-8) candidates.

    Acceptance uses only the candidates through the entry being changed, which is exact
    because no other candidate's alternating sum moves.

    Args:
        params: Code parameters; ``pattern`` gives the trial values.
        p: Edge distribution from GRADE (GD codes) or uniform (UNF codes).
        weights: Cycle-6 and cycle-8 weights.
        budget: Deviation caps; defaults to ``SearchBudget.default_for(params)``.
        seed: Seed of the initial random placement.
        best_improvement: Take the single best admissible value per entry instead of
            accepting every running improvement in the value scan.
    """
    return _run(
        params,
        p,
        budget,
        seed,
        best_improvement,
        lambda flat: _CycleCounter(flat, params, weights),
        "cycle",
    )


def ao_objects(
    params: CodeParams,
    p: EdgeDistribution,
    weights: ObjectWeights = ObjectWeights(),
    budget: SearchBudget | None = None,
    seed: int = DEFAULT_SEED,
    best_improvement: bool = False,
) -> AoResult:
    """Fine-grained optimizer: minimize w1 t212 + w2 t213 + w3 t222 + w4 t313.

    The global object counts are kept in path tables and updated incrementally from the
    paths through the entry being changed.
    """
    return _run(
        params,
        p,
        budget,
        seed,
        best_improvement,
        lambda flat: _ObjectCounter(flat, params, weights),
        "object",
    )


def run_restarts(
    optimizer: Optimizer,
    seed: int = DEFAULT_SEED,
    restarts: int = 20,
    threads: int = 1,
) -> list[AoResult]:
    """Run ``optimizer(seed=s)`` for s = seed, seed+1, ...; results come back in seed order.

    The seed is passed by keyword so partials that bind leading positional arguments, such
    as ``partial(ao_cycles, params, p)``, keep their own defaults for weights and budget.
    """
    if restarts < 1:
        raise ValidationError(f"restarts must be >= 1, got {restarts}")
    seeds = [seed + k for k in range(restarts)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda s: optimizer(seed=s), seeds))
    return [optimizer(seed=s) for s in seeds]


def select_best(results: Sequence[AoResult]) -> AoResult:
    """Lowest objective; ties go to the earliest result."""
    if not results:
        raise ValidationError("no optimizer results to choose from")
    return results[min(range(len(results)), key=lambda k: (results[k].objective, k))]


def best_of_restarts(
    optimizer: Optimizer,
    seed: int = DEFAULT_SEED,
    restarts: int = 20,
    threads: int = 1,
) -> AoResult:
    """Lowest-objective result over the restarts; ties go to the earliest seed."""
    best = select_best(run_restarts(optimizer, seed, restarts, threads))
    logger.info("best of %d restarts: seed %d, objective %.6g", restarts, best.seed, best.objective)
    return best


# ---------------------------------------------------------------------------
# Objectives and the exhaustive oracle
# ---------------------------------------------------------------------------

def cycle_count_objective(
    params: CodeParams,
    weights: CycleWeights = CycleWeights(),
    structures: Sequence[int] | None = None,
) -> MatrixObjective:
    """Fresh recount of the weighted active cycle-6/cycle-8 candidates of a matrix.

    ``structures`` restricts the cycle-8 term to the given structure ids.
    """
    cycle6 = enumerate_cycles(params.gamma, params.kappa, 3)
    cycle8 = enumerate_cycles(params.gamma, params.kappa, 4)
    keep8 = (
        np.ones(len(cycle8), dtype=bool)
        if structures is None
        else np.isin(cycle8.structures, list(structures))
    )

    def objective(matrix: np.ndarray) -> float:
        value = 0.0
        if weights.cycle6:
            value += weights.cycle6 * np.count_nonzero(cycle6.active(matrix))
        if weights.cycle8:
            value += weights.cycle8 * np.count_nonzero(cycle8.active(matrix) & keep8)
        return float(value)

    return objective


def object_count_objective(
    params: CodeParams,
    weights: ObjectWeights = ObjectWeights(),
) -> MatrixObjective:
    """Fresh recount of the weighted protograph object counts of a matrix."""

    def objective(matrix: np.ndarray) -> float:
        return count_objects(matrix, params).weighted(weights)

    return objective


def exhaustive_partition_search(
    params: CodeParams,
    objective: MatrixObjective,
    limit: int = EXHAUSTIVE_LIMIT,
) -> PartitioningMatrix:
    """Global minimizer of ``objective`` over every partitioning matrix.

    The objective must be invariant under column permutations, as every count here is, so
    only one matrix per multiset of columns (columns in sorted order) is evaluated. Ties go
    to the lexicographically smallest matrix in row-major order.

    Raises:
        TooLarge: If (m_t + 1)^(gamma * kappa) exceeds ``limit``.
    """
    validate_params(params)
    raw = len(params.pattern) ** params.entry_count
    if raw > limit:
        raise TooLarge(f"{raw} partitioning matrices exceed the exhaustive limit {limit}")
    columns = np.asarray(list(product(params.pattern, repeat=params.gamma)), dtype=np.int64)

    best_value = math.inf
    best_key: tuple[int, ...] | None = None
    best_matrix: np.ndarray | None = None
    for choice in combinations_with_replacement(range(columns.shape[0]), params.kappa):
        matrix = columns[list(choice)].T
        value = float(objective(matrix))
        key = tuple(int(v) for v in matrix.ravel())
        if value < best_value or (value == best_value and best_key is not None and key < best_key):
            best_value, best_key, best_matrix = value, key, matrix
    assert best_matrix is not None
    logger.info("exhaustive optimum %.6g", best_value)
    return PartitioningMatrix(best_matrix)
