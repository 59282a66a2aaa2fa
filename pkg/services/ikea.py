"""
Задача стеллажа: связка без потерь, выходные ячейки которой раскладываются по
L колонкам с загрузками δ_l как можно ближе к 1/L; поиск минимального числа полок N.

Выходной символ — пара (клетка связки, колонка). Раскладка с нулевым остатком —
это связка покупателей вместе с равномерным законом на колонках.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Iterator

import numpy as np

import config
from services.distributions import Pmf
from services.errors import InfeasibleError, ValidationError, WorkLimitExceeded
from services.mec import (
    Coupling,
    MarginalSet,
    check_coupling,
    coupling_constraints,
    greedy_mec,
    max_vertex_support,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PartitionPlan:
    """
    Связка с N выходными ячейками, колонка каждой ячейки (T_{lb}),
    загрузки колонок δ_l и остаток Σ_l (δ_l − 1/L)².
    """

    coupling: Coupling
    assignment: tuple[int, ...]
    column_loads: tuple[float, ...]
    residue: float

    @property
    def shelves(self) -> int:
        return self.coupling.B

    @property
    def columns(self) -> int:
        return len(self.column_loads)

    def to_json(self) -> dict[str, Any]:
        return {
            "shelves": self.shelves,
            "columns": self.columns,
            "coupling": self.coupling.to_json(),
            "assignment": list(self.assignment),
            "column_loads": list(self.column_loads),
            "residue": self.residue,
        }


## ────────────── Сборка плана ──────────────
def _residue(loads: np.ndarray, L: int, tolerance: float) -> float:
    value = float(np.sum((loads - 1.0 / L) ** 2))
    return 0.0 if value <= L * tolerance**2 else value


def _build_plan(
    cells: list[tuple[int, ...]],
    columns: list[int],
    masses: list[float],
    L: int,
    N: int,
    tolerance: float,
) -> PartitionPlan:
    """Сортирует ячейки по убыванию массы и делит крупнейшую пополам, пока их меньше N."""
    symbols = [(m, c, l) for m, c, l in zip(masses, cells, columns) if m > tolerance]
    while len(symbols) < N:
        largest = max(range(len(symbols)), key=lambda k: (symbols[k][0], -k))
        m, c, l = symbols[largest]
        symbols[largest] = (m / 2.0, c, l)
        symbols.insert(largest + 1, (m / 2.0, c, l))
    symbols.sort(key=lambda s: (-s[0], s[1], s[2]))

    R = len(symbols[0][1])
    output = Pmf.from_masses([s[0] for s in symbols], tolerance=config.DRIFT_LIMIT)
    coupling = Coupling(
        output=output,
        recovery_maps=tuple(tuple(s[1][i] for s in symbols) for i in range(R)),
    )
    assignment = tuple(s[2] for s in symbols)
    loads = np.bincount(np.asarray(assignment), weights=output.as_array(), minlength=L)
    return PartitionPlan(
        coupling=coupling,
        assignment=assignment,
        column_loads=tuple(float(v) for v in loads),
        residue=_residue(loads, L, tolerance),
    )


def _zero_residue_plan(
    marginals: MarginalSet,
    L: int,
    N: int,
    tolerance: float,
) -> PartitionPlan | None:
    """Жадная связка покупателей и равномерного закона на колонках, если в ней ≤ N ячеек."""
    extended = MarginalSet.from_pmfs(list(marginals.sources) + [Pmf.uniform(L)])
    greedy = greedy_mec(extended, tolerance)
    if greedy.B > N:
        return None
    cells = [cell[:-1] for cell in greedy.support_cells()]
    columns = [cell[-1] for cell in greedy.support_cells()]
    return _build_plan(cells, columns, list(greedy.output.masses), L, N, tolerance)


## ────────────── Перебор опор ──────────────
def _independent_supports(matrix: np.ndarray, limit: int, work_limit: int) -> Iterator[tuple[int, ...]]:
    """
    Все наборы линейно независимых столбцов размера ≤ limit, в лексикографическом порядке.

    Каждая проверка ранга — единица работы; больше work_limit проверок — WorkLimitExceeded.
    """
    n = matrix.shape[1]
    checks = 0

    def extend(start: int, chosen: list[int]) -> Iterator[tuple[int, ...]]:
        nonlocal checks
        for j in range(start, n):
            candidate = chosen + [j]
            checks += 1
            if checks > work_limit:
                raise WorkLimitExceeded(work_limit)
            if np.linalg.matrix_rank(matrix[:, candidate]) < len(candidate):
                continue
            yield tuple(candidate)
            if len(candidate) < limit:
                yield from extend(j + 1, candidate)

    yield from extend(0, [])


def _solve_support(
    support: tuple[int, ...],
    cell_part: np.ndarray,
    column_part: np.ndarray,
    rhs: np.ndarray,
    L: int,
    tolerance: float,
) -> np.ndarray | None:
    """
    min ‖C x − 1/L‖² при M x = α на опоре (система ККТ через lstsq).

    Returns:
        x ≥ 0 или None, если опора не даёт допустимой связки
    """
    M = cell_part[:, support]
    C = column_part[:, support]
    k, m = len(support), M.shape[0]
    target = np.full(L, 1.0 / L)
    kkt = np.block([[2.0 * C.T @ C, M.T], [M, np.zeros((m, m))]])
    right = np.concatenate([2.0 * C.T @ target, rhs])
    solution = np.linalg.lstsq(kkt, right, rcond=None)[0]
    x = solution[:k]
    if np.any(x < -tolerance) or np.max(np.abs(M @ x - rhs)) > config.DRIFT_LIMIT:
        return None
    return np.clip(x, 0.0, None)


def best_partition(
    marginals: MarginalSet,
    L: int,
    N: int,
    *,
    work_limit: int = config.WORK_LIMIT,
    tolerance: float = config.TOLERANCE,
) -> PartitionPlan:
    """
    Раскладка с минимальным остатком среди связок не более чем с N ячейками.

    Оптимум достигается на опоре с независимыми столбцами расширенной системы
    (маргиналы + загрузки колонок), где он совпадает с решением задачи наименьших
    квадратов с ограничениями-равенствами; поэтому перебор таких опор точен.
    Если жадная связка с равномерным законом колонок помещается в N ячеек,
    остаток равен нулю без перебора.
    """
    if L < 1:
        raise ValidationError(f"number of columns must be positive, got {L}")
    if N < 1:
        raise ValidationError(f"number of shelves must be positive, got {N}")

    quick = _zero_residue_plan(marginals, L, N, tolerance)
    if quick is not None:
        logger.debug("ikea: N=%d, L=%d → нулевой остаток без перебора", N, L)
        return quick

    cells, cell_matrix, rhs = coupling_constraints(marginals, tolerance)
    pairs = [(c, l) for c in range(len(cells)) for l in range(L)]
    cell_part = cell_matrix[:, [c for c, _ in pairs]]
    column_part = np.array([[1.0 if l == col else 0.0 for _, l in pairs] for col in range(L)])
    extended = np.vstack([cell_part, column_part])
    m = marginals.matrix()
    needed = [(i, a) for i in range(marginals.R) for a in range(marginals.A) if m[i, a] > tolerance]

    best: tuple[float, tuple[int, ...], np.ndarray] | None = None
    solves = 0
    for support in _independent_supports(extended, N, work_limit):
        chosen = [cells[pairs[j][0]] for j in support]
        if any(all(c[i] != a for c in chosen) for i, a in needed):
            continue
        solves += 1
        x = _solve_support(support, cell_part, column_part, rhs, L, tolerance)
        if x is None:
            continue
        residue = _residue(column_part[:, support] @ x, L, tolerance)
        if best is None or residue < best[0] - 1e-15:
            best = (residue, support, x)

    if best is None:
        raise InfeasibleError(f"no lossless coupling fits into {N} shelves")
    residue, support, x = best
    plan = _build_plan(
        [cells[pairs[j][0]] for j in support],
        [pairs[j][1] for j in support],
        list(x),
        L,
        N,
        tolerance,
    )
    problems = check_coupling(marginals, plan.coupling, tolerance=config.DRIFT_LIMIT)
    if problems:
        raise InfeasibleError("partition plan violates the coupling constraints: " + "; ".join(problems))
    logger.info("🗄️ Раскладка: N=%d, L=%d, остаток=%.3g (решено систем: %d)", N, L, plan.residue, solves)
    return plan


## ────────────── Минимальное число полок ──────────────
def min_shelves(
    marginals: MarginalSet,
    L: int,
    epsilon: float = config.IKEA_EPSILON,
    *,
    work_limit: int = config.WORK_LIMIT,
    tolerance: float = config.TOLERANCE,
) -> int:
    """
    Наименьшее N с остатком ≤ epsilon.

    Стартовое N удваивается от R(A−1)+1 до первого успеха, затем двоичный
    поиск между последней неудачей и успехом (остаток не возрастает по N).
    """
    if epsilon < 0:
        raise ValidationError(f"epsilon must be nonnegative, got {epsilon}")
    memo: dict[int, float] = {}

    def residue_at(N: int) -> float:
        if N not in memo:
            try:
                memo[N] = best_partition(marginals, L, N, work_limit=work_limit, tolerance=tolerance).residue
            except InfeasibleError:
                memo[N] = float("inf")
        return memo[N]

    floor = max(int(np.count_nonzero(row > tolerance)) for row in marginals.matrix())
    low, high = floor, max(max_vertex_support(marginals), floor)
    while residue_at(high) > epsilon:
        low = high + 1
        high *= 2

    while low < high:
        mid = (low + high) // 2
        if residue_at(mid) <= epsilon:
            high = mid
        else:
            low = mid + 1
    logger.info("📏 Минимум полок: N=%d при L=%d, ε=%.3g", high, L, epsilon)
    return high
