"""Lifting optimizer (CPO): coordinate descent over the circulant exponents.

Lifted cycles-4 always dominate the objective: their weight exceeds the largest value the
remaining targets can reach, so no move ever trades a cycle-4 for anything else.
"""
from __future__ import annotations

import logging
from typing import Protocol

import numpy as np

from .model import validate_params, validate_partitioning
from .schema import CodeParams, LiftingMatrix, LiftResult, LiftTargets, ObjectWeights
from .settings import DEFAULT_SEED
from .topology import (
    EntryIndex,
    build_entry_index,
    combine_path_counts,
    count_objects,
    enumerate_cycles,
    enumerate_paths,
    path_entry_indices,
)

logger = logging.getLogger(__name__)


class _Term(Protocol):
    weight: float

    def reset(self, lifting: np.ndarray) -> None: ...

    def value(self) -> float: ...

    def upper_bound(self) -> float: ...

    def trial(self, entry: int, current: int) -> np.ndarray: ...

    def commit(self, entry: int, current: int, new: int) -> None: ...


class LiftedCandidates:
    """Partition-active candidates of one length and their lifted multiplicity.

    A candidate closes in the Tanner graph when its alternating lifting sum is 0 mod z; it
    then contributes z * max(0, L - span) cycles.
    """

    def __init__(self, flat: np.ndarray, params: CodeParams, half_length: int, weight: float):
        candidates = enumerate_cycles(params.gamma, params.kappa, half_length)
        replicas = np.maximum(0, params.replicas - candidates.spans(flat))
        replicas[~candidates.active(flat)] = 0
        keep = replicas > 0
        self.plus = candidates.plus_entries()[keep]
        self.minus = candidates.minus_entries()[keep]
        self.multiplicity = replicas[keep] * params.circulant
        self.index: EntryIndex = build_entry_index(self.plus, self.minus, params.entry_count)
        self.circulant = params.circulant
        self.weight = float(weight)
        self.sums = np.zeros(self.multiplicity.size, dtype=np.int64)

    def reset(self, lifting: np.ndarray) -> None:
        self.sums = lifting[self.plus].sum(axis=1) - lifting[self.minus].sum(axis=1)

    def count(self) -> int:
        return int(self.multiplicity[self.sums % self.circulant == 0].sum())

    def value(self) -> float:
        return self.weight * self.count()

    def upper_bound(self) -> float:
        return self.weight * float(self.multiplicity.sum())

    def trial(self, entry: int, current: int) -> np.ndarray:
        ids, net = self.index.lookup(entry)
        local = self.sums[ids]
        shifts = np.arange(self.circulant) - current
        closed = (local[None, :] + np.outer(shifts, net)) % self.circulant == 0
        weights = self.multiplicity[ids]
        base = self.count() - int(weights[local % self.circulant == 0].sum())
        return self.weight * (base + closed.astype(np.int64) @ weights)

    def commit(self, entry: int, current: int, new: int) -> None:
        ids, net = self.index.lookup(entry)
        self.sums[ids] += net * (new - current)


class LiftedObjects:
    """Concatenated-cycle pairs whose three joining paths agree on their lifting residue.

    Paths are binned by (column pair, first row, partition sum, lifting sum mod z); an
    object is lifted-active when both fundamental cycles close, i.e. all three paths land
    in the same bin. Replica span is not tracked here; each active object counts z.
    """

    def __init__(self, flat: np.ndarray, params: CodeParams, weights: ObjectWeights):
        self.weight = 1.0
        self.weights = weights.as_array()
        self.circulant = params.circulant
        width = 6 * params.memory + 1
        npairs = params.kappa * (params.kappa - 1) // 2
        self.shape = (npairs, params.gamma, width, self.circulant)
        self.size = int(np.prod(self.shape))
        self.bound = params.circulant * count_objects(flat, params).weighted(weights)
        self.kinds = []
        for paths, index in zip(
            enumerate_paths(params.gamma, params.kappa),
            path_entry_indices(params.gamma, params.kappa),
        ):
            bins = (paths.pairs.astype(np.int64) * params.gamma + paths.rows[:, 0]) * width
            bins = (bins + paths.sums(flat) + 3 * params.memory) * self.circulant
            self.kinds.append({"paths": paths, "index": index, "bins": bins})
        self._value = 0.0

    def _evaluate(self, tables: list[np.ndarray]) -> float:
        counts = combine_path_counts(*(table.reshape(self.shape) for table in tables))
        weighted = self.weights @ [counts.t212, counts.t213, counts.t222, counts.t313]
        return float(self.circulant * weighted)

    def reset(self, lifting: np.ndarray) -> None:
        for kind in self.kinds:
            kind["sums"] = kind["paths"].sums(lifting)
            kind["table"] = np.bincount(
                kind["bins"] + kind["sums"] % self.circulant, minlength=self.size
            )
        self._value = self._evaluate([kind["table"] for kind in self.kinds])

    def value(self) -> float:
        return self._value

    def upper_bound(self) -> float:
        return self.bound

    def _shifted(self, kind: dict, ids: np.ndarray, net: np.ndarray, delta: int) -> np.ndarray:
        old = kind["bins"][ids] + kind["sums"][ids] % self.circulant
        new = kind["bins"][ids] + (kind["sums"][ids] + net * delta) % self.circulant
        return (
            kind["table"]
            + np.bincount(new, minlength=self.size)
            - np.bincount(old, minlength=self.size)
        )

    def trial(self, entry: int, current: int) -> np.ndarray:
        lookups = [kind["index"].lookup(entry) for kind in self.kinds]
        totals = np.empty(self.circulant)
        for x in range(self.circulant):
            if x == current:
                totals[x] = self._value
                continue
            tables = [
                self._shifted(kind, ids, net, x - current)
                for kind, (ids, net) in zip(self.kinds, lookups)
            ]
            totals[x] = self._evaluate(tables)
        return totals

    def commit(self, entry: int, current: int, new: int) -> None:
        for kind in self.kinds:
            ids, net = kind["index"].lookup(entry)
            kind["table"] = self._shifted(kind, ids, net, new - current)
            kind["sums"][ids] += net * (new - current)
        self._value = self._evaluate([kind["table"] for kind in self.kinds])


def _total(terms: list[_Term]) -> float:
    return sum(term.value() for term in terms)


def _apply(terms: list[_Term], lifting: np.ndarray, entry: int, new: int) -> None:
    current = int(lifting[entry])
    for term in terms:
        term.commit(entry, current, new)
    lifting[entry] = new


def _steepest_descent(terms: list[_Term], lifting: np.ndarray) -> list[float]:
    """Repeatedly apply the single best (entry, value) move; ties go to the lowest entry."""
    value = _total(terms)
    trace = [value]
    while True:
        best: tuple[float, int, int] | None = None
        for entry in range(lifting.size):
            totals = sum(term.trial(entry, int(lifting[entry])) for term in terms)
            x = int(np.argmin(totals))
            if totals[x] < value and (best is None or totals[x] < best[0]):
                best = (float(totals[x]), entry, x)
        if best is None:
            return trace
        _apply(terms, lifting, best[1], best[2])
        value = _total(terms)
        trace.append(value)


def _sweeping_descent(terms: list[_Term], lifting: np.ndarray) -> list[float]:
    """Sweep the entries, moving each to its best value, until a pass changes nothing."""
    value = _total(terms)
    trace = [value]
    improved = True
    while improved:
        improved = False
        for entry in range(lifting.size):
            totals = sum(term.trial(entry, int(lifting[entry])) for term in terms)
            x = int(np.argmin(totals))
            if totals[x] < value:
                _apply(terms, lifting, entry, x)
                value = _total(terms)
                trace.append(value)
                improved = True
    return trace


def cpo_lift(
    matrix: np.ndarray,
    params: CodeParams,
    targets: LiftTargets = LiftTargets(),
    seed: int = DEFAULT_SEED,
) -> LiftResult:
    """Greedy lifting of a partitioning matrix.

    Starting from a seeded random lifting matrix, cycle targets use steepest descent over
    all (entry, value) pairs; object targets sweep entry by entry, since each object trial
    is far costlier. When lifted cycles-4 remain, the search restarts from a fresh random
    matrix, up to ``targets.max_restarts`` attempts, and the best attempt is kept.

    Args:
        matrix: Partitioning matrix P.
        params: Code parameters; ``circulant`` is z and ``replicas`` is L.
        targets: Weights of the targets after cycles-4.
        seed: Seed of the random starting matrices.

    Returns:
        The best LiftResult; ``cycles4_free`` is False if no attempt removed every
        lifted cycle-4.
    """
    validate_params(params)
    flat = np.asarray(validate_partitioning(matrix, params), dtype=np.int64).ravel()
    rng = np.random.default_rng(seed)

    cycles4 = LiftedCandidates(flat, params, 2, weight=1.0)
    rest: list[_Term]
    if targets.objects is None:
        rest = [
            LiftedCandidates(flat, params, half_length, weight)
            for half_length, weight in ((3, targets.cycle6), (4, targets.cycle8))
            if weight
        ]
        descend = _steepest_descent
    else:
        rest = [LiftedObjects(flat, params, targets.objects)]
        descend = _sweeping_descent
    cycles4.weight = 1.0 + sum(term.upper_bound() for term in rest)
    terms: list[_Term] = [cycles4, *rest]

    best: LiftResult | None = None
    attempts = max(1, targets.max_restarts)
    for attempt in range(1, attempts + 1):
        lifting = rng.integers(0, params.circulant, size=params.entry_count)
        for term in terms:
            term.reset(lifting)
        trace = descend(terms, lifting)
        found = cycles4.count()
        logger.info(
            "lifting attempt %d: %d lifted cycles-4, objective %.6g", attempt, found, trace[-1]
        )
        candidate = LiftResult(
            matrix=LiftingMatrix(lifting.reshape(params.gamma, params.kappa)),
            cycles4=found,
            objective=trace[-1],
            trace=trace,
            seed=seed,
            cycles4_free=found == 0,
            restarts=attempt,
        )
        if best is None or (candidate.cycles4, candidate.objective) < (
            best.cycles4,
            best.objective,
        ):
            best = candidate
        if best.cycles4_free:
            break
    assert best is not None
    best.restarts = attempt
    return best
