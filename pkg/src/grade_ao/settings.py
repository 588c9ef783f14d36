from __future__ import annotations

import os
from dataclasses import dataclass

from dotenv import load_dotenv

from .errors import ValidationError

DEFAULT_SEED = 42


@dataclass(slots=True)
class RuntimeSettings:
    """Process-wide knobs: worker cap, default seed and log verbosity."""

    threads: int = 1
    seed: int = DEFAULT_SEED
    log_level: str = "WARNING"


@dataclass(slots=True)
class Paths:
    """Common project paths used by scripts and the command line."""

    data_dir: str = "data"
    codes_dir: str = "data/codes"
    artifacts_dir: str = "artifacts"


def _positive_int(name: str, raw: str) -> int:
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValidationError(f"{name} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValidationError(f"{name} must be >= 1, got {value}")
    return value


def load_settings() -> tuple[RuntimeSettings, Paths]:
    """Load environment-backed settings and return typed config objects.

    Reads ``SC_GRADE_THREADS``, ``SC_GRADE_SEED`` and ``SC_GRADE_LOG_LEVEL`` after loading a
    ``.env`` file if one is present.

    Returns:
        Tuple containing runtime settings and common path settings.

    Raises:
        ValidationError: If ``SC_GRADE_THREADS`` is not a positive integer or
            ``SC_GRADE_SEED`` is not an integer.
    """
    load_dotenv()
    threads = _positive_int("SC_GRADE_THREADS", os.getenv("SC_GRADE_THREADS", "1"))
    raw_seed = os.getenv("SC_GRADE_SEED", str(DEFAULT_SEED))
    try:
        seed = int(raw_seed)
    except ValueError as exc:
        raise ValidationError(f"SC_GRADE_SEED must be an integer, got {raw_seed!r}") from exc
    return (
        RuntimeSettings(
            threads=threads,
            seed=seed,
            log_level=os.getenv("SC_GRADE_LOG_LEVEL", "WARNING").upper(),
        ),
        Paths(),
    )
