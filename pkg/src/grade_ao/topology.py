"""Cycle candidates, paths and concatenated-cycle objects in the base matrix.

Candidates and paths are held as integer arrays so that cycle conditions, replica spans and
counts are computed for all of them at once.

Conventions:
    * A cycle candidate (j1, i1, ..., jg, ig) uses entries (i_k, j_k) with sign + and
      (i_k, j_{k+1}) with sign -.
    * Crossing row i from entry value k to value k' moves the VN replica index by k - k'.
      The replica span is max offset - min offset along the walk.
    * In the lifted graph every active candidate or object contributes z * max(0, L - span).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Any

import numpy as np

from .errors import NotACandidate, TooLarge, ValidationError
from .laurent import as_probabilities
from .objects import ObjectGraph
from .schema import CodeParams, CycleCandidate, EdgeDistribution, ObjectCounts, Path

logger = logging.getLogger(__name__)

STRUCTURE_BY_FOOTPRINT = {
    (2, 2): 1,
    (2, 3): 2,
    (3, 2): 2,
    (3, 3): 3,
    (2, 4): 4,
    (4, 2): 4,
    (3, 4): 5,
    (4, 3): 5,
    (4, 4): 6,
}
BRUTE_FORCE_LIMIT = 10**7


# ---------------------------------------------------------------------------
# Cycle candidates
# ---------------------------------------------------------------------------

def canonical_form(cols: tuple[int, ...], rows: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Lexicographically smallest interleaving over all rotations and both directions."""
    g = len(cols)
    reversed_cols = (cols[0],) + tuple(reversed(cols[1:]))
    reversed_rows = tuple(reversed(rows))
    best: tuple[int, ...] | None = None
    for c, r in ((cols, rows), (reversed_cols, reversed_rows)):
        for k in range(g):
            nodes = tuple(v for pair in zip(c[k:] + c[:k], r[k:] + r[:k]) for v in pair)
            if best is None or nodes < best:
                best = nodes
    assert best is not None
    return best[0::2], best[1::2]


def _closed_sequences(length: int, alphabet: int) -> list[tuple[int, ...]]:
    """Sequences over [alphabet] using every symbol, cyclically consecutive-distinct."""
    return [
        seq
        for seq in product(range(alphabet), repeat=length)
        if len(set(seq)) == alphabet and all(seq[k] != seq[(k + 1) % length] for k in range(length))
    ]


@lru_cache(maxsize=None)
def cycle_templates(half_length: int, row_count: int, col_count: int) -> np.ndarray:
    """Canonical candidates of length 2g using exactly rows 0..r-1 and columns 0..c-1.

    Returns:
        Array of shape (T, 2, g): ``[:, 0]`` columns and ``[:, 1]`` rows.
    """
    forms = {
        canonical_form(cols, rows)
        for rows in _closed_sequences(half_length, row_count)
        for cols in _closed_sequences(half_length, col_count)
    }
    if not forms:
        return np.zeros((0, 2, half_length), dtype=np.int64)
    return np.asarray(sorted(forms), dtype=np.int64)


@dataclass(frozen=True, slots=True, eq=False)
class EntryIndex:
    """Compressed per-entry candidate lists: the candidates through each base-matrix entry."""

    indptr: np.ndarray
    members: np.ndarray
    signs: np.ndarray

    def lookup(self, entry: int) -> tuple[np.ndarray, np.ndarray]:
        """Unique candidate ids through ``entry`` and their net signed multiplicity there."""
        lo, hi = self.indptr[entry], self.indptr[entry + 1]
        ids, inverse = np.unique(self.members[lo:hi], return_inverse=True)
        net = np.bincount(inverse, weights=self.signs[lo:hi], minlength=ids.size)
        return ids, net.astype(np.int64)


def build_entry_index(plus: np.ndarray, minus: np.ndarray, entry_count: int) -> EntryIndex:
    count, width = plus.shape
    ids = np.repeat(np.arange(count, dtype=np.int32), width)
    entries = np.concatenate([plus.ravel(), minus.ravel()])
    members = np.concatenate([ids, ids])
    signs = np.concatenate(
        [np.ones(plus.size, dtype=np.int8), -np.ones(minus.size, dtype=np.int8)]
    )
    order = np.argsort(entries, kind="stable")
    indptr = np.zeros(entry_count + 1, dtype=np.int64)
    np.cumsum(np.bincount(entries, minlength=entry_count), out=indptr[1:])
    return EntryIndex(indptr, members[order], signs[order])


@dataclass(frozen=True, slots=True, eq=False)
class CandidateSet:
    """All cycle candidates of one length in a gamma x kappa base matrix."""

    half_length: int
    gamma: int
    kappa: int
    cols: np.ndarray
    rows: np.ndarray
    structures: np.ndarray

    def __len__(self) -> int:
        return int(self.cols.shape[0])

    @property
    def length(self) -> int:
        return 2 * self.half_length

    def candidate(self, k: int) -> CycleCandidate:
        return CycleCandidate(
            cols=tuple(int(v) for v in self.cols[k]),
            rows=tuple(int(v) for v in self.rows[k]),
            structure=int(self.structures[k]),
        )

    def plus_entries(self) -> np.ndarray:
        return self.rows.astype(np.int64) * self.kappa + self.cols

    def minus_entries(self) -> np.ndarray:
        return self.rows.astype(np.int64) * self.kappa + np.roll(self.cols, -1, axis=1)

    def alternating_sums(self, matrix: Any) -> np.ndarray:
        flat = np.asarray(matrix, dtype=np.int64).ravel()
        total = np.zeros(len(self), dtype=np.int64)
        for k in range(self.half_length):
            row_base = self.rows[:, k].astype(np.int64) * self.kappa
            nxt = (k + 1) % self.half_length
            total += flat[row_base + self.cols[:, k]] - flat[row_base + self.cols[:, nxt]]
        return total

    def active(self, matrix: Any) -> np.ndarray:
        return self.alternating_sums(matrix) == 0

    def lifted_active(self, matrix: Any, lifting: Any, circulant: int) -> np.ndarray:
        """Candidates satisfying both the partition and the lifting cycle condition."""
        return self.active(matrix) & (self.alternating_sums(lifting) % circulant == 0)

    def spans(self, matrix: Any) -> np.ndarray:
        """Replica span of every candidate (meaningful where the candidate is active)."""
        flat = np.asarray(matrix, dtype=np.int64).ravel()
        offset = np.zeros(len(self), dtype=np.int64)
        low = offset.copy()
        high = offset.copy()
        for k in range(self.half_length - 1):
            row_base = self.rows[:, k].astype(np.int64) * self.kappa
            offset += flat[row_base + self.cols[:, k]] - flat[row_base + self.cols[:, k + 1]]
            np.minimum(low, offset, out=low)
            np.maximum(high, offset, out=high)
        return high - low

    def structure_counts(self, mask: np.ndarray | None = None) -> dict[int, int]:
        tags = self.structures if mask is None else self.structures[mask]
        values, counts = np.unique(tags, return_counts=True)
        return {int(v): int(c) for v, c in zip(values, counts)}

    def entry_index(self) -> EntryIndex:
        return build_entry_index(
            self.plus_entries(), self.minus_entries(), self.gamma * self.kappa
        )

    def through(self, row: int, col: int) -> list[CycleCandidate]:
        """The per-entry list: candidates using entry (row, col)."""
        entry = row * self.kappa + col
        hits = (self.plus_entries() == entry).any(axis=1) | (
            self.minus_entries() == entry
        ).any(axis=1)
        return [self.candidate(int(k)) for k in np.flatnonzero(hits)]


@lru_cache(maxsize=8)
def enumerate_cycles(gamma: int, kappa: int, half_length: int) -> CandidateSet:
    """Every cycle candidate of length 2g, each listed once, tagged by footprint structure.

    Templates for each (rows used, columns used) footprint are mapped onto every sorted
    choice of rows and columns.
    """
    if half_length < 2:
        raise ValidationError(f"cycle half-length must be >= 2, got {half_length}")
    col_blocks: list[np.ndarray] = []
    row_blocks: list[np.ndarray] = []
    tag_blocks: list[np.ndarray] = []
    for row_count in range(2, min(half_length, gamma) + 1):
        for col_count in range(2, min(half_length, kappa) + 1):
            templates = cycle_templates(half_length, row_count, col_count)
            if templates.size == 0:
                continue
            row_sets = np.asarray(list(combinations(range(gamma), row_count)), dtype=np.int16)
            col_sets = np.asarray(list(combinations(range(kappa), col_count)), dtype=np.int16)
            mapped_rows = row_sets[:, templates[:, 1]]
            mapped_cols = col_sets[:, templates[:, 0]]
            shape = (row_sets.shape[0], col_sets.shape[0], templates.shape[0], half_length)
            rows = np.broadcast_to(mapped_rows[:, None], shape).reshape(-1, half_length)
            cols = np.broadcast_to(mapped_cols[None], shape).reshape(-1, half_length)
            tag = STRUCTURE_BY_FOOTPRINT.get((row_count, col_count), 0) if half_length == 4 else 0
            row_blocks.append(rows)
            col_blocks.append(cols)
            tag_blocks.append(np.full(rows.shape[0], tag, dtype=np.int8))

    if row_blocks:
        rows = np.concatenate(row_blocks)
        cols = np.concatenate(col_blocks)
        tags = np.concatenate(tag_blocks)
    else:
        rows = np.zeros((0, half_length), dtype=np.int16)
        cols = np.zeros((0, half_length), dtype=np.int16)
        tags = np.zeros(0, dtype=np.int8)
    for array in (rows, cols, tags):
        array.setflags(write=False)
    logger.debug("%d cycle-%d candidates for %dx%d", rows.shape[0], 2 * half_length, gamma, kappa)
    return CandidateSet(half_length, gamma, kappa, cols, rows, tags)


@lru_cache(maxsize=8)
def cycle_entry_index(gamma: int, kappa: int, half_length: int) -> EntryIndex:
    return enumerate_cycles(gamma, kappa, half_length).entry_index()


def enumerate_cycle4(gamma: int, kappa: int) -> CandidateSet:
    return enumerate_cycles(gamma, kappa, 2)


def enumerate_cycle6(gamma: int, kappa: int) -> CandidateSet:
    """All 6 C(gamma,3) C(kappa,3) cycle-6 candidates; per-entry lists via ``entry_index``."""
    return enumerate_cycles(gamma, kappa, 3)


def enumerate_cycle8(gamma: int, kappa: int) -> CandidateSet:
    """All cycle-8 candidates tagged with their structure S1..S6."""
    return enumerate_cycles(gamma, kappa, 4)


# ---------------------------------------------------------------------------
# Single-candidate checks
# ---------------------------------------------------------------------------

def _check_indices(candidate: CycleCandidate, matrix: np.ndarray) -> None:
    gamma, kappa = matrix.shape
    if any(not 0 <= i < gamma for i in candidate.rows) or any(
        not 0 <= j < kappa for j in candidate.cols
    ):
        raise IndexError(f"candidate {candidate.nodes} outside a {gamma}x{kappa} matrix")


def _side_values(candidate: CycleCandidate, matrix: Any) -> tuple[list[int], list[int]]:
    entries = np.asarray(matrix, dtype=np.int64)
    _check_indices(candidate, entries)
    g = len(candidate.cols)
    plus = [int(entries[candidate.rows[k], candidate.cols[k]]) for k in range(g)]
    minus = [int(entries[candidate.rows[k], candidate.cols[(k + 1) % g]]) for k in range(g)]
    return plus, minus


def alternating_sum(candidate: CycleCandidate, matrix: Any) -> int:
    plus, minus = _side_values(candidate, matrix)
    return sum(plus) - sum(minus)


def check_partition_condition(candidate: CycleCandidate, matrix: Any) -> bool:
    """True iff the candidate becomes a cycle candidate of the protograph."""
    return alternating_sum(candidate, matrix) == 0


def check_lifting_condition(candidate: CycleCandidate, lifting: Any, circulant: int) -> bool:
    """True iff the candidate closes in the lifted Tanner graph (mod z)."""
    return alternating_sum(candidate, lifting) % circulant == 0


def candidate_offsets(candidate: CycleCandidate, matrix: Any) -> list[int]:
    """VN replica offsets along the walk, starting at 0 for j1."""
    plus, minus = _side_values(candidate, matrix)
    offsets = [0]
    for up, down in zip(plus, minus):
        offsets.append(offsets[-1] + up - down)
    return offsets


def candidate_span(candidate: CycleCandidate, matrix: Any) -> int:
    """Replica span of an active candidate.

    Raises:
        NotACandidate: If the walk does not close (the partition condition fails).
    """
    offsets = candidate_offsets(candidate, matrix)
    if offsets[-1] != 0:
        raise NotACandidate(f"candidate {candidate.nodes} does not satisfy the cycle condition")
    visited = offsets[:-1]
    return max(visited) - min(visited)


# ---------------------------------------------------------------------------
# Cycle counting
# ---------------------------------------------------------------------------

def count_active_candidates(matrix: Any, length: int) -> int:
    """Protograph-level count of active candidates of the given length."""
    gamma, kappa = np.asarray(matrix).shape
    return int(np.count_nonzero(enumerate_cycles(gamma, kappa, length // 2).active(matrix)))


def count_cycles_tanner(
    matrix: Any,
    lifting: Any,
    params: CodeParams,
    length: int,
    convention: str = "span",
) -> int:
    """Number of cycles of the given length in the lifted SC Tanner graph.

    Args:
        matrix: Partitioning matrix P.
        lifting: Lifting matrix L, entries in [0, z).
        params: Supplies z (``circulant``) and the replica count L.
        length: 4, 6 or 8.
        convention: ``"span"`` counts z * max(0, L - span) per active candidate;
            ``"full"`` counts z * L regardless of span.
    """
    if length not in (4, 6, 8):
        raise ValidationError(f"cycle length must be 4, 6 or 8, got {length}")
    candidates = enumerate_cycles(params.gamma, params.kappa, length // 2)
    active = candidates.lifted_active(matrix, lifting, params.circulant)
    if convention == "full":
        return params.circulant * params.replicas * int(np.count_nonzero(active))
    if convention != "span":
        raise ValidationError(f"unknown counting convention {convention!r}")
    spans = candidates.spans(matrix)[active]
    return params.circulant * int(np.maximum(0, params.replicas - spans).sum())


# ---------------------------------------------------------------------------
# Paths and concatenated-cycle objects
# ---------------------------------------------------------------------------

def column_pairs(kappa: int) -> np.ndarray:
    return np.asarray(list(combinations(range(kappa), 2)), dtype=np.int64).reshape(-1, 2)


def _row_tuples(kind: int, gamma: int) -> np.ndarray:
    if kind == 1:
        tuples = [(i,) for i in range(gamma)]
    elif kind == 2:
        tuples = [(a, b) for a in range(gamma) for b in range(gamma) if a != b]
    else:
        tuples = [
            (a, mid, b)
            for a in range(gamma)
            for mid in range(gamma)
            for b in range(gamma)
            if mid not in (a, b)
        ]
    return np.asarray(tuples, dtype=np.int64).reshape(-1, kind)


def _interior_columns(kind: int, kappa: int, pairs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(pair id, interior columns) for every admissible interior of a type-``kind`` path."""
    count = pairs.shape[0]
    if kind == 1:
        return np.arange(count), np.zeros((count, 0), dtype=np.int64)
    j1, j2 = pairs[:, 0:1], pairs[:, 1:2]
    cols = np.arange(kappa)
    if kind == 2:
        keep = (cols[None, :] != j1) & (cols[None, :] != j2)
        pair_ids, first = np.nonzero(keep)
        return pair_ids, first[:, None]
    a = cols[None, :, None]
    b = cols[None, None, :]
    keep = (
        (a != b)
        & (a != j1[:, :, None]) & (a != j2[:, :, None])
        & (b != j1[:, :, None]) & (b != j2[:, :, None])
    )
    pair_ids, first, second = np.nonzero(keep)
    return pair_ids, np.stack([first, second], axis=1)


@dataclass(frozen=True, slots=True, eq=False)
class PathSet:
    """All type-``kind`` paths between column pairs j1 < j2, grouped by pair."""

    kind: int
    gamma: int
    kappa: int
    pairs: np.ndarray
    rows: np.ndarray
    cols: np.ndarray

    def __len__(self) -> int:
        return int(self.pairs.shape[0])

    def path(self, k: int) -> Path:
        return Path(
            kind=self.kind,
            rows=tuple(int(v) for v in self.rows[k]),
            cols=tuple(int(v) for v in self.cols[k]),
        )

    def plus_entries(self) -> np.ndarray:
        return self.rows * self.kappa + self.cols[:, :-1]

    def minus_entries(self) -> np.ndarray:
        return self.rows * self.kappa + self.cols[:, 1:]

    def offsets(self, matrix: Any) -> np.ndarray:
        """VN replica offsets along every path, shape (N, kind + 1), first column 0."""
        flat = np.asarray(matrix, dtype=np.int64).ravel()
        steps = flat[self.plus_entries()] - flat[self.minus_entries()]
        return np.concatenate([np.zeros((len(self), 1), dtype=np.int64), steps.cumsum(1)], 1)

    def sums(self, matrix: Any) -> np.ndarray:
        flat = np.asarray(matrix, dtype=np.int64).ravel()
        return (flat[self.plus_entries()] - flat[self.minus_entries()]).sum(axis=1)

    def pair_bounds(self) -> np.ndarray:
        """Start index of every pair's block (paths are stored pair-major)."""
        npairs = self.kappa * (self.kappa - 1) // 2
        return np.searchsorted(self.pairs, np.arange(npairs + 1))

    def entry_index(self) -> EntryIndex:
        return build_entry_index(
            self.plus_entries(), self.minus_entries(), self.gamma * self.kappa
        )

    def lookup(self, first_row: int, last_row: int, j1: int, j2: int) -> list[Path]:
        """The list of type-``kind`` paths joining (first_row, j1) to (last_row, j2)."""
        mask = (
            (self.cols[:, 0] == j1)
            & (self.cols[:, -1] == j2)
            & (self.rows[:, 0] == first_row)
            & (self.rows[:, -1] == last_row)
        )
        return [self.path(int(k)) for k in np.flatnonzero(mask)]


@lru_cache(maxsize=4)
def enumerate_paths(gamma: int, kappa: int) -> tuple[PathSet, PathSet, PathSet]:
    """Type-1, type-2 and type-3 path sets between every column pair.

    Type-2 paths use two distinct rows; type-3 paths may start and end on the same row but
    their middle row differs from both. Interior columns avoid the endpoints and each other.
    """
    pairs = column_pairs(kappa)
    sets = []
    for kind in (1, 2, 3):
        pair_ids, interior = _interior_columns(kind, kappa, pairs)
        row_tuples = _row_tuples(kind, gamma)
        reps = row_tuples.shape[0]
        cols = np.concatenate(
            [pairs[pair_ids, 0:1], interior, pairs[pair_ids, 1:2]], axis=1
        )
        path_pairs = np.repeat(pair_ids, reps).astype(np.int32)
        path_cols = np.repeat(cols, reps, axis=0).astype(np.int64)
        path_rows = np.tile(row_tuples, (cols.shape[0], 1)).astype(np.int64)
        for array in (path_pairs, path_cols, path_rows):
            array.setflags(write=False)
        sets.append(PathSet(kind, gamma, kappa, path_pairs, path_rows, path_cols))
        logger.debug("%d type-%d paths for %dx%d", path_pairs.size, kind, gamma, kappa)
    return sets[0], sets[1], sets[2]


@lru_cache(maxsize=4)
def path_entry_indices(gamma: int, kappa: int) -> tuple[EntryIndex, EntryIndex, EntryIndex]:
    first, second, third = enumerate_paths(gamma, kappa)
    return first.entry_index(), second.entry_index(), third.entry_index()


def _e2(values: np.ndarray) -> np.ndarray:
    """Sum over row pairs a < b of values[:, a] * values[:, b] (rows on axis 1)."""
    total = np.zeros_like(values[:, 0])
    for a, b in combinations(range(values.shape[1]), 2):
        total = total + values[:, a] * values[:, b]
    return total


def _e3(values: np.ndarray) -> np.ndarray:
    total = np.zeros_like(values[:, 0])
    for a, b, c in combinations(range(values.shape[1]), 3):
        total = total + values[:, a] * values[:, b] * values[:, c]
    return total


def combine_path_counts(v1: np.ndarray, v2: np.ndarray, v3: np.ndarray) -> ObjectCounts:
    """Object counts from per-first-row path counts.

    Each input has shape (pairs, gamma, ...) where the trailing axes are cells (partition
    sum, and in lifted mode residue and placement) that all three paths must share.
    """
    t1 = v1.sum(axis=1)
    return ObjectCounts(
        t212=int((t1 * _e2(v2)).sum()),
        t213=int((t1 * v2.sum(axis=1) * v3.sum(axis=1)).sum()),
        t222=int(_e3(v2).sum()),
        t313=int((t1 * _e2(v3)).sum()),
    )


@dataclass(slots=True, eq=False)
class PathCountTable:
    """v_k[pair, first row, last row, l + 3m]: type-k paths with partition sum l."""

    memory: int
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray

    @property
    def offset(self) -> int:
        return 3 * self.memory

    def counts(self) -> ObjectCounts:
        return combine_path_counts(self.v1.sum(axis=2), self.v2.sum(axis=2), self.v3.sum(axis=2))


def build_path_table(matrix: Any, params: CodeParams) -> PathCountTable:
    gamma, kappa, memory = params.gamma, params.kappa, params.memory
    width = 6 * memory + 1
    npairs = kappa * (kappa - 1) // 2
    tables = []
    for paths in enumerate_paths(gamma, kappa):
        cell = (paths.pairs.astype(np.int64) * gamma + paths.rows[:, 0]) * gamma + paths.rows[:, -1]
        index = cell * width + paths.sums(matrix) + 3 * memory
        counts = np.bincount(index, minlength=npairs * gamma * gamma * width)
        tables.append(counts.reshape(npairs, gamma, gamma, width))
    return PathCountTable(memory, *tables)


def _lifted_pair_table(
    first: np.ndarray,
    cells: np.ndarray,
    low: np.ndarray,
    high: np.ndarray,
    gamma: int,
    cell_count: int,
    replicas: int,
) -> np.ndarray:
    """Counts per (first row, cell, placement) with each path spread over its fitting placements."""
    diff = np.zeros((gamma * cell_count, replicas + 1), dtype=np.int64)
    fits = low <= high
    base = first[fits] * cell_count + cells[fits]
    np.add.at(diff, (base, low[fits]), 1)
    np.add.at(diff, (base, high[fits] + 1), -1)
    return diff.cumsum(axis=1)[:, :replicas].reshape(gamma, cell_count * replicas)


def count_objects(
    matrix: Any,
    params: CodeParams,
    lifting: Any | None = None,
) -> ObjectCounts:
    """Counts of 2-1-2, 2-1-3, 2-2-2 and 3-1-3 objects.

    Without ``lifting`` the counts are taken in the protograph: paths are grouped by their
    partition sum and multiplied over the index sets of the fine-grained optimizer. With
    ``lifting`` all three paths must also agree on their lifting sum modulo z, and each
    object contributes z copies per replica placement at which all its VNs fit.
    """
    if lifting is None:
        return build_path_table(matrix, params).counts()

    gamma, memory = params.gamma, params.memory
    z, replicas = params.circulant, params.replicas
    width = 6 * memory + 1
    cell_count = width * z
    prepared = []
    for paths in enumerate_paths(gamma, params.kappa):
        offsets = paths.offsets(matrix)
        cells = (offsets[:, -1] + 3 * memory) * z + paths.sums(lifting) % z
        low = -offsets.min(axis=1)
        high = replicas - 1 - offsets.max(axis=1)
        prepared.append((paths.pair_bounds(), paths.rows[:, 0], cells, low, high))

    totals = np.zeros(4, dtype=np.int64)
    npairs = params.kappa * (params.kappa - 1) // 2
    for pair in range(npairs):
        tables = []
        for bounds, first, cells, low, high in prepared:
            lo, hi = bounds[pair], bounds[pair + 1]
            tables.append(
                _lifted_pair_table(
                    first[lo:hi], cells[lo:hi], low[lo:hi], high[lo:hi],
                    gamma, cell_count, replicas,
                )[None]
            )
        counts = combine_path_counts(*tables)
        totals += [counts.t212, counts.t213, counts.t222, counts.t313]
    return ObjectCounts(*(int(z * value) for value in totals))


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def object_prototypes(graph: ObjectGraph, gamma: int, kappa: int) -> tuple[np.ndarray, np.ndarray]:
    """Every valid node assignment of ``graph`` into the base matrix.

    Returns:
        ``(entries, weights)``: the base-matrix entry of every edge per assignment, shape
        (N, |E|), and |Stab|/|Aut| per assignment so that weights sum to one per prototype.
    """
    nx_graph = graph.to_networkx()

    def assignments(nodes: tuple[str, ...], size: int) -> np.ndarray:
        grid = np.indices((size,) * len(nodes)).reshape(len(nodes), -1).T
        position = {node: k for k, node in enumerate(nodes)}
        keep = np.ones(grid.shape[0], dtype=bool)
        for a, b in combinations(nodes, 2):
            if set(nx_graph.neighbors(a)) & set(nx_graph.neighbors(b)):
                keep &= grid[:, position[a]] != grid[:, position[b]]
        return grid[keep]

    cols = assignments(graph.vns, kappa)
    rows = assignments(graph.cns, gamma)
    automorphisms = graph.automorphisms()
    v_pos = {node: k for k, node in enumerate(graph.vns)}
    c_pos = {node: k for k, node in enumerate(graph.cns)}
    stab = np.zeros((cols.shape[0], rows.shape[0]))
    for sigma in automorphisms:
        v_perm = [v_pos[sigma[node]] for node in graph.vns]
        c_perm = [c_pos[sigma[node]] for node in graph.cns]
        fixed_v = (cols[:, v_perm] == cols).all(axis=1)
        fixed_c = (rows[:, c_perm] == rows).all(axis=1)
        stab += np.outer(fixed_v, fixed_c)

    edge_v = [v_pos[vn] for vn, _ in graph.edges]
    edge_c = [c_pos[cn] for _, cn in graph.edges]
    entries = rows[None, :, edge_c] * kappa + cols[:, None, edge_v]
    weights = stab / len(automorphisms)
    return entries.reshape(-1, len(graph.edges)), weights.ravel()


def brute_force_expected_count(
    gamma: int,
    kappa: int,
    pattern: tuple[int, ...],
    p: EdgeDistribution | Any,
    target: int | ObjectGraph,
    limit: int = BRUTE_FORCE_LIMIT,
) -> float:
    """Expected number of active targets, by enumerating every partitioning matrix.

    Args:
        target: Cycle length (4, 6 or 8) or an object graph.

    Raises:
        TooLarge: If there are more than ``limit`` matrices.
    """
    probs = as_probabilities(p)
    base = len(pattern)
    entry_count = gamma * kappa
    total = base**entry_count
    if total > limit:
        raise TooLarge(f"{total} matrices exceed the brute-force limit {limit}")
    values = np.asarray(pattern, dtype=np.int64)

    if isinstance(target, ObjectGraph):
        entries, weights = object_prototypes(target, gamma, kappa)
        incidence = target.incidence
    else:
        candidates = enumerate_cycles(gamma, kappa, int(target) // 2)
        entries = np.concatenate([candidates.plus_entries(), candidates.minus_entries()], axis=1)
        g = candidates.half_length
        incidence = np.concatenate([np.ones(g), -np.ones(g)]).astype(np.int64)[:, None]
        weights = np.ones(entries.shape[0])

    if entries.shape[0] == 0:
        return 0.0
    chunk = max(1, 2_000_000 // (entries.size + 1))
    expectation = 0.0
    radix = base ** np.arange(entry_count - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (codes[:, None] // radix) % base
        matrix_prob = probs[digits].prod(axis=1)
        sums = values[digits][:, entries] @ incidence
        active = (sums == 0).all(axis=2)
        expectation += float(matrix_prob @ (active @ weights))
    return expectation
