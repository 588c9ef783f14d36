from __future__ import annotations

import json
import re
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import MatrixParseError
from .schema import CodeParams, EdgeDistribution

_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True, slots=True)
class MatrixHeader:
    """First non-comment line of a matrix file: ``gamma kappa m z L``."""

    gamma: int
    kappa: int
    memory: int
    circulant: int
    replicas: int

    @classmethod
    def from_params(cls, params: CodeParams) -> MatrixHeader:
        return cls(params.gamma, params.kappa, params.memory, params.circulant, params.replicas)

    def params(self, pattern: Sequence[int] | None = None) -> CodeParams:
        """CodeParams for this header; full memory unless a coupling pattern is given."""
        chosen = tuple(range(self.memory + 1)) if pattern is None else tuple(pattern)
        return CodeParams(
            self.gamma, self.kappa, self.memory, chosen, self.circulant, self.replicas
        )

    def as_line(self) -> str:
        return f"{self.gamma} {self.kappa} {self.memory} {self.circulant} {self.replicas}"


@dataclass(slots=True, eq=False)
class MatrixFile:
    """Parsed matrix file: header, integer entries and the leading comment lines."""

    header: MatrixHeader
    entries: np.ndarray
    comments: list[str] = field(default_factory=list)


def _integers(line: str, number: int, path: str, expected: int, what: str) -> list[int]:
    tokens = list(_TOKEN.finditer(line))
    values: list[int] = []
    for match in tokens:
        try:
            values.append(int(match.group()))
        except ValueError:
            raise MatrixParseError(
                f"expected an integer in {what}, got {match.group()!r}",
                path,
                number,
                match.start() + 1,
            ) from None
    if len(values) != expected:
        column = tokens[expected].start() + 1 if len(tokens) > expected else len(line) + 1
        raise MatrixParseError(
            f"{what} needs {expected} integers, found {len(values)}", path, number, column
        )
    return values


def parse_matrix(text: str, path: str = "<string>") -> MatrixFile:
    """Parse the matrix text format.

    ``#`` lines before the header are kept as comments; blank lines and later comments
    are skipped.

    Raises:
        MatrixParseError: With the 1-based line and column of the first problem.
    """
    comments: list[str] = []
    header: MatrixHeader | None = None
    rows: list[list[int]] = []
    last_line = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        last_line = number
        line = raw.rstrip()
        stripped = line.strip()
        if stripped.startswith("#"):
            if header is None:
                comments.append(stripped[1:].strip())
            continue
        if not stripped:
            continue
        if header is None:
            values = _integers(line, number, path, 5, "header 'gamma kappa m z L'")
            if min(values[:2]) < 1 or values[2] < 0 or min(values[3:]) < 1:
                raise MatrixParseError("header values out of range", path, number, 1)
            header = MatrixHeader(*values)
            continue
        if len(rows) == header.gamma:
            raise MatrixParseError(
                f"more than gamma={header.gamma} matrix rows", path, number, 1
            )
        rows.append(_integers(line, number, path, header.kappa, f"row {len(rows) + 1}"))

    if header is None:
        raise MatrixParseError("empty matrix file: no header line", path, max(last_line, 1), 1)
    if len(rows) != header.gamma:
        raise MatrixParseError(
            f"expected {header.gamma} matrix rows, found {len(rows)}", path, last_line + 1, 1
        )
    return MatrixFile(header, np.asarray(rows, dtype=np.int64), comments)


def read_matrix(path: str | Path) -> MatrixFile:
    """Load one matrix file from disk."""
    source = Path(path)
    return parse_matrix(source.read_text(encoding="utf-8"), path=str(source))


def format_matrix(entries: Any, header: MatrixHeader, comments: Sequence[str] = ()) -> str:
    lines = [f"# {comment}" for comment in comments]
    lines.append(header.as_line())
    lines.extend(" ".join(str(int(v)) for v in row) for row in np.asarray(entries))
    return "\n".join(lines) + "\n"


def write_matrix(
    path: str | Path,
    entries: Any,
    header: MatrixHeader,
    comments: Sequence[str] = (),
) -> None:
    """Write a matrix in the text format, creating parent folders as needed."""
    destination = Path(path)
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text(format_matrix(entries, header, comments), encoding="utf-8")


def format_distribution(p: EdgeDistribution) -> str:
    """Single line of space-separated probabilities with 12 significant digits."""
    return " ".join(format_probability(value) for value in p.probs) + "\n"


def format_probability(value: float) -> str:
    """``1.0`` rather than ``1``; at most 12 significant digits."""
    return repr(float(f"{value:.12g}"))


def parse_distribution(text: str, path: str = "<string>") -> EdgeDistribution:
    """Parse a distribution line and renormalize it to sum to one.

    Raises:
        MatrixParseError: On an empty file, a non-numeric token or a negative/zero total.
    """
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        values: list[float] = []
        for match in _TOKEN.finditer(raw):
            try:
                values.append(float(match.group()))
            except ValueError:
                raise MatrixParseError(
                    f"expected a probability, got {match.group()!r}",
                    path,
                    number,
                    match.start() + 1,
                ) from None
        probs = np.asarray(values)
        if np.any(probs < 0) or probs.sum() <= 0:
            raise MatrixParseError(
                "probabilities must be non-negative with a positive sum", path, number, 1
            )
        return EdgeDistribution.from_array(probs / probs.sum())
    raise MatrixParseError("empty distribution file", path, 1, 1)


def read_distribution(path: str | Path) -> EdgeDistribution:
    source = Path(path)
    return parse_distribution(source.read_text(encoding="utf-8"), path=str(source))


def write_distribution(path: str | Path, p: EdgeDistribution) -> None:
    destination = Path(path)
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text(format_distribution(p), encoding="utf-8")


def save_report(report: dict[str, Any], path: str | Path) -> None:
    """Persist a JSON report, sorted keys, for inspection or diffing.

    Args:
        report: JSON-serializable mapping.
        path: Destination file path.
    """
    destination = Path(path)
    destination.parent.mkdir(parents=True, exist_ok=True)
    with destination.open("w", encoding="utf-8") as file_handle:
        json.dump(report, file_handle, indent=2, sort_keys=True)
        file_handle.write("\n")


def load_report(path: str | Path) -> dict[str, Any]:
    """Load a JSON report written by ``save_report``."""
    with Path(path).open("r", encoding="utf-8") as file_handle:
        return json.load(file_handle)
