"""Run configuration: defaults, optional JSON config file, environment."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

from .number_field import DEFAULT_HEIGHT_BOUND, DEFAULT_MINKOWSKI_CEILING

FORMATS = ("json", "text")
LEDGER_DIR_ENV = "S3DEFORM_LEDGER_DIR"


@dataclass(frozen=True)
class RunConfig:
    N: int = 6  # p-adic precision of the series ring
    D: int = 6  # total-degree cutoff
    max_index: int = 4
    precision: int = 6  # p-adic digits for power tests
    height_bound: int = DEFAULT_HEIGHT_BOUND
    minkowski_ceiling: float = DEFAULT_MINKOWSKI_CEILING
    workers: int = 1
    format: str = "text"
    ledger_dir: str | None = None

    def __post_init__(self):
        for f in ("N", "D", "max_index", "precision", "height_bound", "minkowski_ceiling", "workers"):
            if getattr(self, f) <= 0:
                raise ValueError(f"config field {f} must be positive")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if self.precision < self.max_index + 1:
            raise ValueError("precision must be at least max_index + 1")

    def with_overrides(self, **kw: Any) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def load_config(path: str | os.PathLike | None = None) -> RunConfig:
    data: dict[str, Any] = {}
    if path is not None:
        data = json.loads(Path(path).read_text())
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "ledger_dir" not in data and os.environ.get(LEDGER_DIR_ENV):
        data["ledger_dir"] = os.environ[LEDGER_DIR_ENV]
    return RunConfig(**data)
