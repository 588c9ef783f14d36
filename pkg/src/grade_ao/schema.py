from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np


@dataclass(frozen=True, slots=True)
class CodeParams:
    """SC code dimensions, coupling pattern and lifting parameters."""

    gamma: int
    kappa: int
    memory: int
    pattern: tuple[int, ...]
    circulant: int = 1
    replicas: int = 1

    @classmethod
    def full_memory(
        cls,
        gamma: int,
        kappa: int,
        memory: int,
        circulant: int = 1,
        replicas: int = 1,
    ) -> CodeParams:
        """Build params whose pattern uses every component 0..m."""
        return cls(gamma, kappa, memory, tuple(range(memory + 1)), circulant, replicas)

    @property
    def pseudo_memory(self) -> int:
        return len(self.pattern) - 1

    @property
    def is_full_memory(self) -> bool:
        return self.pattern == tuple(range(self.memory + 1))

    @property
    def entry_count(self) -> int:
        return self.gamma * self.kappa

    @property
    def constraint_length(self) -> int:
        """(m + 1) * z, the length-fair comparison measure across memories."""
        return (self.memory + 1) * self.circulant

    def values(self) -> np.ndarray:
        return np.asarray(self.pattern, dtype=np.int64)


@dataclass(frozen=True, slots=True)
class EdgeDistribution:
    """Probability vector over the coupling-pattern indices."""

    probs: tuple[float, ...]

    @classmethod
    def uniform(cls, size: int) -> EdgeDistribution:
        return cls(tuple([1.0 / size] * size))

    @classmethod
    def from_array(cls, values: Any) -> EdgeDistribution:
        return cls(tuple(float(value) for value in np.asarray(values, dtype=float).ravel()))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def __len__(self) -> int:
        return len(self.probs)


@dataclass(frozen=True, slots=True, eq=False)
class PartitioningMatrix:
    """gamma x kappa matrix assigning each base-matrix one to a component index."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        array = np.array(self.entries, dtype=np.int64, copy=True)
        array.setflags(write=False)
        object.__setattr__(self, "entries", array)

    def __array__(self, dtype: Any = None, copy: bool | None = None) -> np.ndarray:
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartitioningMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape  # type: ignore[return-value]


@dataclass(frozen=True, slots=True, eq=False)
class LiftingMatrix:
    """gamma x kappa matrix of circulant exponents, reduced modulo z."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        array = np.array(self.entries, dtype=np.int64, copy=True)
        array.setflags(write=False)
        object.__setattr__(self, "entries", array)

    def __array__(self, dtype: Any = None, copy: bool | None = None) -> np.ndarray:
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LiftingMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape  # type: ignore[return-value]


@dataclass(frozen=True, slots=True)
class CycleWeights:
    """Relative weights of cycle-6 and cycle-8 candidates.

    ``cycle6=w, cycle8=1`` is the cycle-based optimizer's weighting; ``cycle8=0`` gives a
    cycle-6-only objective.
    """

    cycle6: float = 100.0
    cycle8: float = 1.0


@dataclass(frozen=True, slots=True)
class ObjectWeights:
    """Weights of the 2-1-2, 2-1-3, 2-2-2 and 3-1-3 concatenated-cycle objects."""

    w212: float = 1.0
    w213: float = 1.0
    w222: float = 1.0
    w313: float = 1.0

    def as_array(self) -> np.ndarray:
        return np.asarray([self.w212, self.w213, self.w222, self.w313], dtype=float)


ObjectiveWeights = CycleWeights | ObjectWeights


@dataclass(frozen=True, slots=True)
class GradeConfig:
    """Gradient-descent knobs.

    Backtracking is on by default, which departs from the plain fixed-step descent: a step
    that raises the objective is rejected and the step size is multiplied by ``shrink``.
    Set ``backtrack=False`` to take every step at the fixed size ``step``, as the classic
    GRADE loop does.
    """

    step: float = 0.01
    tol: float = 1e-9
    max_iters: int = 100_000
    floor: float = 1e-6
    shrink: float = 0.5
    backtrack: bool = True


@dataclass(slots=True)
class GradeResult:
    """Outcome of one gradient-descent run."""

    distribution: EdgeDistribution
    objective_initial: float
    objective_final: float
    iters: int
    converged: bool
    trace: list[float] = field(default_factory=list)

    def to_summary(self) -> dict[str, Any]:
        return {
            "objective_initial": self.objective_initial,
            "objective_final": self.objective_final,
            "iters": self.iters,
            "converged": self.converged,
        }


@dataclass(slots=True)
class PatternSearchResult:
    """Best coupling pattern plus the GRADE value reached by every pattern tried."""

    pattern: tuple[int, ...]
    result: GradeResult
    table: list[tuple[tuple[int, ...], float]] = field(default_factory=list)


@dataclass(frozen=True, slots=True)
class SearchBudget:
    """L1 / L-infinity caps on the deviation ledger of the partition optimizers."""

    d1: float
    d2: float

    @classmethod
    def default_for(cls, params: CodeParams) -> SearchBudget:
        """d1 = ceil(gamma * kappa / 10), d2 = ceil(d1 / 2)."""
        d1 = math.ceil(params.entry_count / 10)
        return cls(d1=d1, d2=math.ceil(d1 / 2))

    @classmethod
    def unlimited(cls) -> SearchBudget:
        return cls(d1=math.inf, d2=math.inf)


@dataclass(slots=True)
class AoResult:
    """Partitioning matrix found by a semi-greedy optimizer run."""

    matrix: PartitioningMatrix
    objective: float
    initial_objective: float
    trace: list[float]
    seed: int
    deviation: tuple[int, ...] = ()
    moves: int = 0


@dataclass(frozen=True, slots=True)
class ObjectCounts:
    """Counts of the four concatenated-cycle object families."""

    t212: int = 0
    t213: int = 0
    t222: int = 0
    t313: int = 0

    def weighted(self, weights: ObjectWeights) -> float:
        return (
            weights.w212 * self.t212
            + weights.w213 * self.t213
            + weights.w222 * self.t222
            + weights.w313 * self.t313
        )

    def as_dict(self) -> dict[str, int]:
        return {key: int(value) for key, value in asdict(self).items()}


@dataclass(frozen=True, slots=True)
class LiftTargets:
    """What the lifting optimizer minimizes after lifted cycles-4.

    With ``objects`` set, the concatenated-object weights replace the cycle weights.
    """

    cycle6: float = 1.0
    cycle8: float = 1.0
    objects: ObjectWeights | None = None
    max_restarts: int = 5


@dataclass(slots=True)
class LiftResult:
    """Lifting matrix found by coordinate descent, with its residual counts."""

    matrix: LiftingMatrix
    cycles4: int
    objective: float
    trace: list[float]
    seed: int
    cycles4_free: bool
    restarts: int = 1


@dataclass(frozen=True, slots=True)
class CycleCandidate:
    """Closed row/column walk (j1, i1, ..., jg, ig) in the base matrix."""

    cols: tuple[int, ...]
    rows: tuple[int, ...]
    structure: int = 0

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(value for pair in zip(self.cols, self.rows) for value in pair)

    @property
    def length(self) -> int:
        return 2 * len(self.cols)


@dataclass(frozen=True, slots=True)
class Path:
    """Type-1, -2 or -3 path between two degree-3 VN columns j1 < j2.

    ``rows`` are the CN rows along the path and ``cols`` the VN columns from j1 to j2.
    """

    kind: int
    rows: tuple[int, ...]
    cols: tuple[int, ...]

    @property
    def endpoints(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.rows[0], self.cols[0]), (self.rows[-1], self.cols[-1])
