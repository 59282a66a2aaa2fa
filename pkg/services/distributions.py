"""
Общие вероятностные типы: конечные распределения (Pmf), энтропии в битах,
взаимная информация и детерминированный генератор случайных чисел.

Все остальные сервисы строятся поверх этого модуля.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

import numpy as np

import config
from services.errors import ValidationError

logger = logging.getLogger(__name__)

# Shannon entropy in bits. 0 <= value <= log2(cardinality).
Entropy = float
# 64-bit unsigned seed; identical seeds give identical sample streams.
RngSeed = int


## ────────────── Распределение на конечном алфавите ──────────────
@dataclass(frozen=True)
class Pmf:
    masses: tuple[float, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.masses) < 1:
            raise ValidationError("pmf must have at least one symbol")
        if self.labels is not None and len(self.labels) != len(self.masses):
            raise ValidationError(
                f"pmf has {len(self.masses)} masses but {len(self.labels)} labels"
            )
        arr = np.asarray(self.masses, dtype=float)
        if not np.all(np.isfinite(arr)) or np.any(arr < -config.TOLERANCE):
            raise ValidationError("pmf masses must be finite and nonnegative")
        if abs(float(arr.sum()) - 1.0) > config.DRIFT_LIMIT:
            raise ValidationError(f"pmf masses sum to {float(arr.sum()):.12g}, expected 1")

    @classmethod
    def from_masses(
        cls,
        masses: Iterable[float],
        labels: Sequence[Any] | None = None,
        *,
        tolerance: float = config.TOLERANCE,
    ) -> "Pmf":
        """
        Строит Pmf с проверкой и нормировкой.

        Суммы, отличающиеся от 1 не более чем на tolerance, нормируются;
        большие отклонения и отрицательные массы отклоняются.
        """
        arr = np.asarray(list(masses), dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("pmf masses must be a non-empty vector")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("pmf masses must be finite")
        if np.any(arr < -tolerance):
            raise ValidationError(f"negative mass in pmf: {arr.min():.3g}")
        arr = np.clip(arr, 0.0, None)
        total = float(arr.sum())
        if abs(total - 1.0) > tolerance:
            raise ValidationError(f"pmf masses sum to {total:.12g}, expected 1")
        arr = arr / total
        return cls(
            masses=tuple(float(m) for m in arr),
            labels=None if labels is None else tuple(str(label) for label in labels),
        )

    @classmethod
    def uniform(cls, size: int) -> "Pmf":
        if size < 1:
            raise ValidationError("uniform pmf needs at least one symbol")
        return cls(masses=tuple([1.0 / size] * size))

    @classmethod
    def from_json(cls, payload: dict[str, Any], *, tolerance: float = config.TOLERANCE) -> "Pmf":
        if not isinstance(payload, dict) or "masses" not in payload:
            raise ValidationError('pmf JSON must be an object with a "masses" field')
        return cls.from_masses(payload["masses"], payload.get("labels"), tolerance=tolerance)

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {"masses": list(self.masses)}
        if self.labels is not None:
            data["labels"] = list(self.labels)
        return data

    @property
    def cardinality(self) -> int:
        return len(self.masses)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.masses, dtype=float)

    def padded(self, size: int) -> "Pmf":
        """Дополняет алфавит нулевыми массами до size символов."""
        if size < self.cardinality:
            raise ValidationError(f"cannot pad pmf of size {self.cardinality} down to {size}")
        extra = size - self.cardinality
        labels = None
        if self.labels is not None:
            labels = self.labels + tuple(f"_pad{i}" for i in range(extra))
        return Pmf(masses=self.masses + (0.0,) * extra, labels=labels)

    def label(self, index: int) -> str:
        return self.labels[index] if self.labels is not None else str(index)


## ────────────── Энтропии ──────────────
def _entropy_bits(masses: np.ndarray) -> float:
    p = masses[masses > 0]
    value = float(-np.sum(p * np.log2(p)))
    return max(value, 0.0)


def entropy(p: Pmf | Sequence[float] | np.ndarray) -> Entropy:
    """H(p) = −Σ p log2 p, с соглашением 0·log 0 = 0; массивы проверяются как Pmf."""
    if not isinstance(p, Pmf):
        p = Pmf.from_masses(np.asarray(p, dtype=float).ravel(), tolerance=config.DRIFT_LIMIT)
    return _entropy_bits(p.as_array())


def binary_entropy(p: float) -> Entropy:
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"binary entropy argument must lie in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def _validate_joint(joint: Sequence[Sequence[float]] | np.ndarray, tolerance: float) -> np.ndarray:
    arr = np.asarray(joint, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError("joint distribution must be a non-empty matrix")
    if np.any(arr < -tolerance) or not np.all(np.isfinite(arr)):
        raise ValidationError("joint distribution has negative or non-finite entries")
    total = float(arr.sum())
    if abs(total - 1.0) > tolerance:
        raise ValidationError(f"joint distribution sums to {total:.12g}, expected 1")
    return np.clip(arr, 0.0, None) / total


def mutual_information(
    joint: Sequence[Sequence[float]] | np.ndarray,
    *,
    tolerance: float = config.TOLERANCE,
) -> Entropy:
    """I(X;Y) = Σ p(x,y) log2 [p(x,y) / (p(x) p(y))] для совместной матрицы p(x,y)."""
    arr = _validate_joint(joint, tolerance)
    px = arr.sum(axis=1, keepdims=True)
    py = arr.sum(axis=0, keepdims=True)
    mask = arr > 0
    ratio = arr[mask] / (px @ py)[mask]
    return max(float(np.sum(arr[mask] * np.log2(ratio))), 0.0)


def conditional_entropy(
    joint: Sequence[Sequence[float]] | np.ndarray,
    given_axis: int = 1,
    *,
    tolerance: float = config.TOLERANCE,
) -> Entropy:
    """
    Условная энтропия по совместной матрице.

    Args:
        joint: матрица p(row, col)
        given_axis: 1 — H(row | col), 0 — H(col | row)

    Returns:
        энтропия в битах
    """
    if given_axis not in (0, 1):
        raise ValidationError("given_axis must be 0 or 1")
    arr = _validate_joint(joint, tolerance)
    marginal = arr.sum(axis=1 - given_axis)
    return max(_entropy_bits(arr.ravel()) - _entropy_bits(marginal), 0.0)


## ────────────── Детерминированная случайность ──────────────
def make_rng(seed: RngSeed) -> np.random.Generator:
    if not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < config.MAX_SEED:
        raise ValidationError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    return np.random.Generator(np.random.PCG64(int(seed)))
