"""Validation of code parameters and matrices, plus distribution discretization.

The continuous side (edge distributions from GRADE) and the integer side (value counts and
partitioning matrices) meet here.
"""
from __future__ import annotations

from collections.abc import Mapping
from typing import Any

import numpy as np

from .errors import DimensionError, DistributionError, PatternError, ValidationError
from .schema import CodeParams, EdgeDistribution, LiftingMatrix, PartitioningMatrix

SUM_TOLERANCE = 1e-12


def validate_params(params: CodeParams) -> CodeParams:
    """Check every CodeParams invariant and return the params unchanged.

    Raises:
        DimensionError: If gamma < 2, kappa < gamma, or memory/circulant/replicas out of range.
        PatternError: If the pattern is not strictly increasing from 0 to the memory.
    """
    if params.gamma < 2:
        raise DimensionError(f"gamma must be >= 2, got {params.gamma}")
    if params.kappa < params.gamma:
        raise DimensionError(f"kappa must be >= gamma, got kappa={params.kappa}")
    if params.memory < 0:
        raise DimensionError(f"memory must be >= 0, got {params.memory}")
    if params.circulant < 1 or params.replicas < 1:
        raise DimensionError("circulant size and replica count must be >= 1")

    pattern = params.pattern
    if not pattern:
        raise PatternError("coupling pattern is empty")
    if pattern[0] != 0:
        raise PatternError(f"pattern must start at 0, got {pattern}")
    if pattern[-1] != params.memory:
        raise PatternError(f"pattern must end at memory {params.memory}, got {pattern}")
    if any(later <= earlier for earlier, later in zip(pattern, pattern[1:])):
        raise PatternError(f"pattern must be strictly increasing, got {pattern}")
    return params


def validate_distribution(
    p: EdgeDistribution,
    size: int | None = None,
    allow_zero: bool = False,
) -> EdgeDistribution:
    """Check that ``p`` is a probability vector, optionally of a given length.

    Raises:
        DistributionError: On wrong length, entries outside (0, 1] (or [0, 1] when
            ``allow_zero``), or a sum further than 1e-12 from one.
    """
    probs = p.as_array()
    if probs.size == 0:
        raise DistributionError("edge distribution is empty")
    if size is not None and probs.size != size:
        raise DistributionError(f"expected {size} probabilities, got {probs.size}")
    low_ok = probs >= 0.0 if allow_zero else probs > 0.0
    if not np.all(low_ok & (probs <= 1.0)):
        raise DistributionError(f"probabilities out of range: {p.probs}")
    if abs(float(probs.sum()) - 1.0) > SUM_TOLERANCE:
        raise DistributionError(f"probabilities sum to {probs.sum()!r}, not 1")
    return p


def _squared_error(counts: np.ndarray, target: np.ndarray, total: int) -> float:
    return float(np.sum((counts / total - target) ** 2))


def discretize_distribution(p: EdgeDistribution, total: int) -> np.ndarray:
    """Return the integer vector u, summing to ``total``, closest to ``total * p`` in L2.

    Largest-remainder rounding (ties to the lower index) is followed by single-unit moves
    between components until none strictly improves; for this separable objective that
    reaches the global minimum.

    Args:
        p: Distribution to discretize; zero entries are allowed.
        total: Number of base-matrix entries, gamma * kappa.

    Returns:
        Non-negative int64 vector of length ``len(p)``.
    """
    if total <= 0:
        raise DimensionError(f"total must be positive, got {total}")
    target = validate_distribution(p, allow_zero=True).as_array()
    scaled = target * total
    counts = np.floor(scaled + 1e-12).astype(np.int64)
    shortfall = int(total - counts.sum())
    if shortfall > 0:
        remainders = scaled - counts
        order = np.argsort(-remainders, kind="stable")
        counts[order[:shortfall]] += 1
    elif shortfall < 0:
        order = np.argsort(scaled - counts, kind="stable")
        for index in order:
            if shortfall == 0:
                break
            if counts[index] > 0:
                counts[index] -= 1
                shortfall += 1

    best = _squared_error(counts, target, total)
    improved = True
    while improved:
        improved = False
        for source in range(counts.size):
            if counts[source] == 0:
                continue
            for sink in range(counts.size):
                if sink == source:
                    continue
                counts[source] -= 1
                counts[sink] += 1
                trial = _squared_error(counts, target, total)
                if trial < best - 1e-15:
                    best = trial
                    improved = True
                    break
                counts[source] += 1
                counts[sink] -= 1
            if improved:
                break
    return counts


def value_counts(matrix: Any, params: CodeParams) -> np.ndarray:
    """Count how many entries take each pattern value, in pattern order."""
    entries = np.asarray(matrix)
    return np.asarray([int(np.count_nonzero(entries == value)) for value in params.pattern])


def distribution_from_matrix(matrix: Any, params: CodeParams) -> EdgeDistribution:
    """Empirical edge distribution of a partitioning matrix.

    Raises:
        ValidationError: If an entry is not a value of the coupling pattern.
    """
    entries = np.asarray(matrix)
    outside = ~np.isin(entries, params.values())
    if outside.any():
        row, col = (int(index) for index in np.argwhere(outside)[0])
        raise ValidationError(
            f"entry ({row}, {col}) = {int(entries[row, col])} not in pattern {params.pattern}"
        )
    counts = value_counts(entries, params)
    return EdgeDistribution.from_array(counts / entries.size)


def partitioning_violations(matrix: Any, params: CodeParams) -> list[str]:
    """List every PartitioningMatrix invariant failure, one string per problem."""
    entries = np.asarray(matrix)
    expected = (params.gamma, params.kappa)
    if entries.shape != expected:
        return [f"shape {entries.shape} does not match (gamma, kappa) = {expected}"]
    allowed = set(params.pattern)
    return [
        f"entry ({row}, {col}) = {int(entries[row, col])} not in pattern {params.pattern}"
        for row in range(params.gamma)
        for col in range(params.kappa)
        if int(entries[row, col]) not in allowed
    ]


def lifting_violations(matrix: Any, params: CodeParams) -> list[str]:
    """List every LiftingMatrix invariant failure, one string per problem."""
    entries = np.asarray(matrix)
    expected = (params.gamma, params.kappa)
    if entries.shape != expected:
        return [f"shape {entries.shape} does not match (gamma, kappa) = {expected}"]
    bad = np.argwhere((entries < 0) | (entries >= params.circulant))
    return [
        f"lifting entry ({row}, {col}) = {int(entries[row, col])} not in [0, {params.circulant})"
        for row, col in bad
    ]


def validate_partitioning(matrix: Any, params: CodeParams) -> PartitioningMatrix:
    failures = partitioning_violations(matrix, params)
    if failures:
        raise ValidationError("; ".join(failures))
    return matrix if isinstance(matrix, PartitioningMatrix) else PartitioningMatrix(matrix)


def validate_lifting(matrix: Any, params: CodeParams) -> LiftingMatrix:
    failures = lifting_violations(matrix, params)
    if failures:
        raise ValidationError("; ".join(failures))
    return matrix if isinstance(matrix, LiftingMatrix) else LiftingMatrix(matrix)


def relabel_matrix(matrix: Any, mapping: Mapping[int, int]) -> np.ndarray:
    """Replace partition values per ``mapping``; values not in it are kept.

    ``{2: 4}`` turns an m_t = 2 matrix over (0, 1, 2) into one over (0, 1, 4).
    """
    entries = np.asarray(matrix, dtype=np.int64)
    relabeled = entries.copy()
    for source, target in mapping.items():
        relabeled[entries == source] = target
    return relabeled


def place_distribution(
    params: CodeParams,
    counts: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Randomly place exactly ``counts[k]`` copies of pattern value k into the matrix."""
    counts = np.asarray(counts, dtype=np.int64)
    if counts.sum() != params.entry_count or counts.size != len(params.pattern):
        raise DimensionError("value counts do not match the matrix size and pattern")
    values = np.repeat(params.values(), counts)
    return rng.permutation(values).reshape(params.gamma, params.kappa)


def sample_partitioning(
    params: CodeParams,
    p: EdgeDistribution,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw every entry independently from ``p`` over the pattern values."""
    probs = validate_distribution(p, size=len(params.pattern), allow_zero=True).as_array()
    return rng.choice(params.values(), size=(params.gamma, params.kappa), p=probs)
