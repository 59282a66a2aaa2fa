"""
Энтропийный вывод направления причинности для пары категориальных переменных.

Для X→Y ищется экзогенная E минимальной энтропии с Y = f(X, E): это связка
минимальной энтропии условных законов P(Y | X=i). То же в обратную сторону;
направление с меньшей энтропией инновации считается причинным.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Literal

import numpy as np
import pandas as pd
from scipy import stats

import config
from services.distributions import Entropy, Pmf, entropy
from services.errors import ValidationError
from services.mec import MarginalSet, exhaustive_mec, greedy_mec, identical_sources, max_vertex_support

logger = logging.getLogger(__name__)

Direction = Literal["X→Y", "Y→X", "undecided"]
Method = Literal["greedy", "exact", "auto"]
Statistic = Literal["entropy_of_e", "entropy_plus_cause"]

METHODS = ("greedy", "exact", "auto")
STATISTICS = ("entropy_of_e", "entropy_plus_cause")


## ────────────── Таблица сопряжённости ──────────────
@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.size == 0:
            raise ValidationError("contingency table must be a non-empty matrix")
        if np.any(counts < 0):
            raise ValidationError("counts must be nonnegative")
        if counts.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValidationError("labels do not match the table shape")

    @classmethod
    def from_counts(
        cls,
        counts: Any,
        row_labels: Iterable[Any] | None = None,
        col_labels: Iterable[Any] | None = None,
    ) -> "ContingencyTable":
        arr = np.asarray(counts, dtype=float)
        if arr.ndim != 2:
            raise ValidationError("contingency table must be a matrix")
        rows = tuple(str(v) for v in row_labels) if row_labels is not None else tuple(map(str, range(arr.shape[0])))
        cols = tuple(str(v) for v in col_labels) if col_labels is not None else tuple(map(str, range(arr.shape[1])))
        return cls(counts=arr, row_labels=rows, col_labels=cols)

    @property
    def total(self) -> float:
        return float(np.asarray(self.counts).sum())

    def joint(self) -> np.ndarray:
        if self.total <= 0:
            raise ValidationError("contingency table is all zeros")
        return np.asarray(self.counts, dtype=float) / self.total

    def swapped(self) -> "ContingencyTable":
        return ContingencyTable(
            counts=np.asarray(self.counts).T.copy(),
            row_labels=self.col_labels,
            col_labels=self.row_labels,
        )


def estimate_joint(pairs: pd.DataFrame | Iterable[tuple[Any, Any]]) -> ContingencyTable:
    """
    Таблица частот по парам (x, y); метки упорядочены по первому появлению.

    Args:
        pairs: DataFrame из двух колонок или последовательность пар

    Returns:
        ContingencyTable
    """
    frame = pairs if isinstance(pairs, pd.DataFrame) else pd.DataFrame(list(pairs))
    if frame.empty:
        raise ValidationError("no pairs to tabulate")
    if frame.shape[1] != 2:
        raise ValidationError(f"expected two columns of paired values, got {frame.shape[1]}")
    x_codes, x_labels = pd.factorize(frame.iloc[:, 0])
    y_codes, y_labels = pd.factorize(frame.iloc[:, 1])
    if (x_codes < 0).any() or (y_codes < 0).any():
        raise ValidationError("pairs contain missing values")
    table = pd.crosstab(x_codes, y_codes).reindex(
        index=range(len(x_labels)), columns=range(len(y_labels)), fill_value=0
    )
    logger.debug("таблица %dx%d из %d пар", len(x_labels), len(y_labels), len(frame))
    return ContingencyTable(
        counts=table.to_numpy(dtype=float),
        row_labels=tuple(str(v) for v in x_labels),
        col_labels=tuple(str(v) for v in y_labels),
    )


def conditionals(
    table: ContingencyTable,
    direction: Literal["forward", "backward"] = "forward",
    *,
    smoothing: bool = False,
) -> MarginalSet:
    """
    forward — законы P(Y | X=i) по строкам, backward — P(X | Y=j) по столбцам.

    Строки без наблюдений отбрасываются с предупреждением; smoothing добавляет
    единицу к каждой ячейке.
    """
    if direction not in ("forward", "backward"):
        raise ValidationError(f"direction must be forward or backward, got {direction!r}")
    counts = np.asarray(table.counts, dtype=float)
    if counts.sum() <= 0:
        raise ValidationError("contingency table is all zeros")
    if direction == "backward":
        counts = counts.T
    labels = table.col_labels if direction == "forward" else table.row_labels
    if smoothing:
        counts = counts + 1.0
    row_sums = counts.sum(axis=1)
    empty = row_sums <= 0
    if empty.any():
        logger.warning("⚠️ Отброшено %d условий без наблюдений (%s)", int(empty.sum()), direction)
    rows = counts[~empty] / row_sums[~empty, None]
    return MarginalSet(sources=tuple(Pmf.from_masses(r, labels) for r in rows))


## ────────────── Энтропия инновации ──────────────
def resolve_method(marginals: MarginalSet, method: Method) -> Literal["greedy", "exact"]:
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}")
    if method == "auto":
        return "exact" if marginals.R * marginals.A <= config.EXACT_AUTO_LIMIT else "greedy"
    return method


def innovation_entropy(
    marginals: MarginalSet,
    method: Method = "greedy",
    *,
    work_limit: int = config.WORK_LIMIT,
    tolerance: float = config.TOLERANCE,
) -> Entropy:
    """Энтропия связки минимальной энтропии условных законов (жадной или точной)."""
    if resolve_method(marginals, method) == "exact":
        coupling = exhaustive_mec(marginals, max_vertex_support(marginals), work_limit, tolerance)
    else:
        coupling = greedy_mec(marginals, tolerance)
    return coupling.entropy


def _independence_p_value(table: ContingencyTable) -> float:
    counts = np.asarray(table.counts, dtype=float)
    counts = counts[counts.sum(axis=1) > 0][:, counts.sum(axis=0) > 0]
    if min(counts.shape) < 2:
        return 1.0
    return float(stats.chi2_contingency(counts, correction=False).pvalue)


## ────────────── Решение о направлении ──────────────
@dataclass(frozen=True)
class CausalVerdict:
    direction: Direction
    h_e_forward: Entropy
    h_e_backward: Entropy
    statistic: Statistic
    margin: float
    h_x: Entropy
    h_y: Entropy
    method: str
    p_value: float
    flags: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> dict[str, Any]:
        return {
            "direction": self.direction,
            "h_e_forward": self.h_e_forward,
            "h_e_backward": self.h_e_backward,
            "statistic": self.statistic,
            "margin": self.margin,
            "h_x": self.h_x,
            "h_y": self.h_y,
            "method": self.method,
            "p_value": self.p_value,
            "flags": list(self.flags),
        }


def infer_direction(
    table: ContingencyTable,
    method: Method = "greedy",
    statistic: Statistic = "entropy_of_e",
    *,
    smoothing: bool = False,
    decision_tolerance: float = config.DECISION_TOLERANCE,
    work_limit: int = config.WORK_LIMIT,
    tolerance: float = config.TOLERANCE,
) -> CausalVerdict:
    """
    Сравнивает H(E) для X→Y и H(Ẽ) для Y→X (entropy_of_e) либо
    H(X)+H(E) против H(Y)+H(Ẽ) (entropy_plus_cause). Меньшее значение выигрывает,
    разница не больше decision_tolerance — направление не определено.
    Независимость (все условные законы совпадают) всегда даёт undecided;
    в этом случае точный перебор не запускается, энтропии считаются жадно.
    """
    if statistic not in STATISTICS:
        raise ValidationError(f"unknown statistic {statistic!r}")
    forward = conditionals(table, "forward", smoothing=smoothing)
    backward = conditionals(table, "backward", smoothing=smoothing)
    independent = identical_sources(forward, tolerance) or identical_sources(backward, tolerance)
    if independent:
        method = "greedy"
    used = {resolve_method(forward, method), resolve_method(backward, method)}

    h_forward = innovation_entropy(forward, method, work_limit=work_limit, tolerance=tolerance)
    h_backward = innovation_entropy(backward, method, work_limit=work_limit, tolerance=tolerance)

    joint = table.joint()
    h_x = entropy(joint.sum(axis=1))
    h_y = entropy(joint.sum(axis=0))
    if statistic == "entropy_of_e":
        score_forward, score_backward = h_forward, h_backward
    else:
        score_forward, score_backward = h_x + h_forward, h_y + h_backward
    margin = score_backward - score_forward

    flags: list[str] = []
    if independent:
        flags.append("independent")
        logger.warning("⚠️ X и Y независимы: направление не определяется")
    if h_forward <= decision_tolerance and h_backward <= decision_tolerance:
        flags.append("deterministic")

    if "independent" in flags or abs(margin) <= decision_tolerance:
        direction: Direction = "undecided"
    else:
        direction = "X→Y" if margin > 0 else "Y→X"

    verdict = CausalVerdict(
        direction=direction,
        h_e_forward=h_forward,
        h_e_backward=h_backward,
        statistic=statistic,
        margin=margin,
        h_x=h_x,
        h_y=h_y,
        method="+".join(sorted(used)),
        p_value=_independence_p_value(table),
        flags=tuple(flags),
    )
    logger.info(
        "🧭 Направление %s: H(E)=%.6f, H(Ẽ)=%.6f, статистика %s",
        direction, h_forward, h_backward, statistic,
    )
    return verdict


## ────────────── Синтетические данные ──────────────
def sample_mechanism_pairs(
    rng: np.random.Generator,
    n: int,
    x_size: int = 10,
    y_size: int = 10,
    e_size: int = 2,
) -> pd.DataFrame:
    """
    Пары (X, Y) из Y = g(X, E): X и E равномерны и независимы, g — случайная таблица.
    """
    if n < 1 or min(x_size, y_size, e_size) < 1:
        raise ValidationError("sample sizes and alphabets must be positive")
    mechanism = rng.integers(0, y_size, size=(x_size, e_size))
    x = rng.integers(0, x_size, size=n)
    e = rng.integers(0, e_size, size=n)
    return pd.DataFrame({"x": x, "y": mechanism[x, e]})
