## ────────────── Конфигурация innokit и настройки запуска ──────────────
import json
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

load_dotenv()

# Defaults. Read once at import; RunConfig.from_env() re-reads the environment at call time.
TOLERANCE = float(os.getenv("INNOKIT_TOLERANCE", "1e-9"))
WORK_LIMIT = int(float(os.getenv("INNOKIT_WORK_LIMIT", "1e7")))
DEFAULT_SEED = int(os.getenv("INNOKIT_SEED", "0"))
OUTPUT_FORMAT = os.getenv("INNOKIT_OUTPUT_FORMAT", "json")

# ───────────────────── NUMERICS ──────────────────────
DRIFT_LIMIT = 1e-7            # допустимый дрейф остатков в жадном алгоритме
DECISION_TOLERANCE = 1e-6     # биты, ниже — направление не определено
EXACT_AUTO_LIMIT = 12         # R·A, до которого causal сам выбирает точный перебор
IKEA_EPSILON = 1e-9

# ───────────────────── STATISTICAL CHECKS ──────────────────────
SIGNIFICANCE = 0.01
MONTE_CARLO_SAMPLES = 100_000

OUTPUT_FORMATS = ("json", "csv")
MAX_SEED = 2**64


## ────────────── Параметры одного запуска ──────────────
@dataclass(frozen=True)
class RunConfig:
    """Run-wide settings shared by every subcommand."""

    tolerance: float = TOLERANCE
    seed: int = DEFAULT_SEED
    work_limit: int = WORK_LIMIT
    output_format: str = OUTPUT_FORMAT

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if not self.work_limit > 0:
            raise ValueError(f"work_limit must be positive, got {self.work_limit}")
        if not 0 <= self.seed < MAX_SEED:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output_format must be one of {OUTPUT_FORMATS}, got {self.output_format!r}")

    @classmethod
    def from_env(cls) -> "RunConfig":
        return cls(
            tolerance=float(os.getenv("INNOKIT_TOLERANCE", str(TOLERANCE))),
            seed=int(os.getenv("INNOKIT_SEED", str(DEFAULT_SEED))),
            work_limit=int(float(os.getenv("INNOKIT_WORK_LIMIT", str(WORK_LIMIT)))),
            output_format=os.getenv("INNOKIT_OUTPUT_FORMAT", OUTPUT_FORMAT),
        )

    def merged(self, path: str | Path | None = None, **overrides: Any) -> "RunConfig":
        """
        Накладывает поля из JSON-файла (--config), затем явные флаги CLI.

        Args:
            path: путь к cfg.json или None
            overrides: значения флагов; None означает «флаг не задан»

        Returns:
            новый RunConfig
        """
        known = {f.name for f in fields(self)}
        updates: dict[str, Any] = {}
        if path is not None:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
            if not isinstance(raw, dict):
                raise ValueError(f"{path}: config must be a JSON object")
            unknown = set(raw) - known
            if unknown:
                raise ValueError(f"{path}: unknown config fields {sorted(unknown)}")
            updates.update(raw)
        updates.update({k: v for k, v in overrides.items() if v is not None and k in known})
        if "work_limit" in updates:
            updates["work_limit"] = int(updates["work_limit"])
        if "seed" in updates:
            updates["seed"] = int(updates["seed"])
        if "tolerance" in updates:
            updates["tolerance"] = float(updates["tolerance"])
        return replace(self, **updates)
