"""
Связка минимальной энтропии (MEC) для набора дискретных маргиналов.

Содержит:
- оценку мощности выходного алфавита B ≥ R(A−1)+1;
- жадный алгоритм (остаточные массы);
- точный перебор вершин многогранника связок (малые задачи);
- покоординатные границы β и нижнюю оценку энтропии через коробку.
"""
from __future__ import annotations

import itertools
import logging
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Sequence

import numpy as np

import config
from services.distributions import Entropy, Pmf, entropy
from services.errors import (
    InfeasibleError,
    InnokitError,
    NumericalDriftError,
    ValidationError,
    WorkLimitExceeded,
)

logger = logging.getLogger(__name__)

# minimal pivot element accepted when moving between supports
PIVOT_EPS = 1e-10


## ────────────── Типы ──────────────
@dataclass(frozen=True)
class MarginalSet:
    """R источников общей мощности A (короткие дополняются нулями) и веса историй γ."""

    sources: tuple[Pmf, ...]
    gammas: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not self.sources:
            raise ValidationError("marginal set needs at least one source")
        sizes = {p.cardinality for p in self.sources}
        if len(sizes) != 1:
            raise ValidationError(f"sources have different cardinalities {sorted(sizes)}; use from_pmfs")
        if self.gammas is not None:
            if len(self.gammas) != len(self.sources):
                raise ValidationError("one gamma per source is required")
            if any(g < 0 for g in self.gammas) or abs(sum(self.gammas) - 1.0) > config.TOLERANCE:
                raise ValidationError("gammas must be a probability vector")

    @classmethod
    def from_pmfs(cls, pmfs: Sequence[Pmf], gammas: Sequence[float] | None = None) -> "MarginalSet":
        if not pmfs:
            raise ValidationError("marginal set needs at least one source")
        size = max(p.cardinality for p in pmfs)
        return cls(
            sources=tuple(p.padded(size) for p in pmfs),
            gammas=None if gammas is None else tuple(float(g) for g in gammas),
        )

    @classmethod
    def from_masses(cls, rows: Sequence[Sequence[float]], gammas: Sequence[float] | None = None) -> "MarginalSet":
        return cls.from_pmfs([Pmf.from_masses(r) for r in rows], gammas)

    @classmethod
    def from_json(cls, payload: Any) -> "MarginalSet":
        """Список Pmf (или списков масс), либо {"sources": [...], "gammas": [...]}."""
        gammas = None
        if isinstance(payload, dict):
            gammas = payload.get("gammas")
            payload = payload.get("sources")
        if not isinstance(payload, list) or not payload:
            raise ValidationError("marginals JSON must be a non-empty list of pmfs")
        pmfs = [Pmf.from_json(p) if isinstance(p, dict) else Pmf.from_masses(p) for p in payload]
        return cls.from_pmfs(pmfs, gammas)

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {"sources": [p.to_json() for p in self.sources]}
        if self.gammas is not None:
            data["gammas"] = list(self.gammas)
        return data

    @property
    def R(self) -> int:
        return len(self.sources)

    @property
    def A(self) -> int:
        return self.sources[0].cardinality

    def matrix(self) -> np.ndarray:
        return np.array([p.masses for p in self.sources], dtype=float)

    def canonical(self) -> tuple["MarginalSet", tuple[tuple[int, ...], ...], tuple[int, ...]]:
        """
        Каноническая форма: массы каждого источника по возрастанию, источники —
        по наименьшей массе.

        Returns:
            (канонический набор, symbol_orders, source_order), где
            symbol_orders[i][a'] — исходный символ, ставший a'-м в i-м каноническом
            источнике, source_order[i'] — исходный номер i'-го источника.
        """
        m = self.matrix()
        symbol_orders = [tuple(int(a) for a in np.argsort(row, kind="stable")) for row in m]
        sorted_rows = [m[i, list(order)] for i, order in enumerate(symbol_orders)]
        source_order = tuple(sorted(range(self.R), key=lambda i: (sorted_rows[i][0], i)))
        sources = tuple(Pmf(masses=tuple(float(v) for v in sorted_rows[i])) for i in source_order)
        gammas = None if self.gammas is None else tuple(self.gammas[i] for i in source_order)
        return (
            MarginalSet(sources=sources, gammas=gammas),
            tuple(symbol_orders[i] for i in source_order),
            source_order,
        )


def decanonicalize_maps(
    maps: Sequence[Sequence[int]],
    symbol_orders: Sequence[Sequence[int]],
    source_order: Sequence[int],
) -> tuple[tuple[int, ...], ...]:
    """Переводит карты восстановления канонического набора в исходные номера."""
    restored: list[tuple[int, ...] | None] = [None] * len(source_order)
    for canon_i, original_i in enumerate(source_order):
        order = symbol_orders[canon_i]
        restored[original_i] = tuple(order[a] for a in maps[canon_i])
    return tuple(m for m in restored if m is not None)


@dataclass(frozen=True)
class Coupling:
    """
    Выходной закон Y (по убыванию массы) и карты восстановления b → a для каждого источника.

    emission_order[b] — шаг жадного алгоритма, на котором выпущен символ b
    (None для связок, найденных перебором).
    """

    output: Pmf
    recovery_maps: tuple[tuple[int, ...], ...]
    emission_order: tuple[int, ...] | None = None

    @property
    def B(self) -> int:
        return self.output.cardinality

    @property
    def entropy(self) -> Entropy:
        return entropy(self.output)

    def support_cells(self) -> tuple[tuple[int, ...], ...]:
        return tuple(zip(*self.recovery_maps))

    def conditionals(self, marginals: MarginalSet) -> np.ndarray:
        """p[i, a, b] = P(Y=y_b | X_i=x_a); строки символов с нулевой массой нулевые."""
        m = marginals.matrix()
        beta = self.output.as_array()
        p = np.zeros((marginals.R, marginals.A, self.B))
        for i, mapping in enumerate(self.recovery_maps):
            for b, a in enumerate(mapping):
                if m[i, a] > 0:
                    p[i, a, b] = beta[b] / m[i, a]
        return p

    def recover(self, symbol: int) -> tuple[int, ...]:
        """Значения всех источников для выходного символа."""
        return tuple(mapping[symbol] for mapping in self.recovery_maps)

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "output": list(self.output.masses),
            "recovery_maps": [list(m) for m in self.recovery_maps],
            "entropy": self.entropy,
        }
        if self.emission_order is not None:
            data["emission_order"] = list(self.emission_order)
        return data


@dataclass(frozen=True)
class BoxBounds:
    """Покоординатные границы a_i ≤ β_i ≤ b_i; обе последовательности по возрастанию."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        lo, hi = np.asarray(self.lower, dtype=float), np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or lo.size == 0:
            raise ValidationError("bounds must be non-empty vectors of equal length")
        if np.any(lo < -config.TOLERANCE) or np.any(lo > hi + config.TOLERANCE):
            raise ValidationError("bounds must satisfy 0 <= lower <= upper")
        if np.any(np.diff(lo) < -config.TOLERANCE) or np.any(np.diff(hi) < -config.TOLERANCE):
            raise ValidationError("bounds must be sorted ascending")

    @property
    def size(self) -> int:
        return len(self.lower)

    def is_feasible(self, tolerance: float = config.TOLERANCE) -> bool:
        return sum(self.lower) <= 1.0 + tolerance and sum(self.upper) >= 1.0 - tolerance

    def to_json(self) -> dict[str, Any]:
        return {"lower": list(self.lower), "upper": list(self.upper)}


## ────────────── Мощность и проверка ограничений ──────────────
def min_output_cardinality(A: int, R: int) -> int:
    """Необходимое число выходных символов: B ≥ R(A−1)+1."""
    if A < 2 or R < 1:
        raise ValidationError(f"cardinality bound needs A >= 2 and R >= 1, got A={A}, R={R}")
    return R * (A - 1) + 1


def max_vertex_support(marginals: MarginalSet) -> int:
    return marginals.R * (marginals.A - 1) + 1


def check_coupling(
    marginals: MarginalSet,
    coupling: Coupling,
    tolerance: float = config.TOLERANCE,
) -> list[str]:
    """
    Система ограничений связки без потерь.

    Проверяется: согласованность Σ_{b→a} β_b = α_{ia}, ровно один прообраз a
    для каждой пары (i, b), Σ_b p_{iab} = 1 и β_max ≤ min_i max_a α_{ia}.

    Returns:
        список нарушений (пустой — связка допустима)
    """
    problems: list[str] = []
    m = marginals.matrix()
    beta = coupling.output.as_array()
    if len(coupling.recovery_maps) != marginals.R:
        return [f"{len(coupling.recovery_maps)} recovery maps for {marginals.R} sources"]
    for i, mapping in enumerate(coupling.recovery_maps):
        if len(mapping) != coupling.B:
            problems.append(f"source {i}: map covers {len(mapping)} of {coupling.B} symbols")
            continue
        if any(not 0 <= a < marginals.A for a in mapping):
            problems.append(f"source {i}: map points outside the alphabet")
            continue
        recovered = np.bincount(np.asarray(mapping, dtype=int), weights=beta, minlength=marginals.A)
        drift = np.abs(recovered - m[i])
        if drift.max() > tolerance:
            problems.append(f"source {i}: marginal mismatch {drift.max():.3g}")
    if not problems:
        sums = coupling.conditionals(marginals).sum(axis=2)
        positive = m > 0
        if np.any(np.abs(sums[positive] - 1.0) > tolerance):
            problems.append("conditionals do not sum to one")
    cap = m.max(axis=1).min()
    if beta.max() > cap + tolerance:
        problems.append(f"largest output mass {beta.max():.6g} exceeds cap {cap:.6g}")
    return problems


## ────────────── Жадный алгоритм ──────────────
def greedy_mec(
    marginals: MarginalSet,
    tolerance: float = config.TOLERANCE,
    drift_limit: float = config.DRIFT_LIMIT,
) -> Coupling:
    """
    На каждом шаге r = min_i max_a (остаток α_{ia}); r вычитается из максимума
    каждого источника. Ничьи — меньший номер источника, затем символа.
    """
    residual = marginals.matrix().copy()
    masses: list[float] = []
    choices: list[tuple[int, ...]] = []
    max_steps = marginals.R * marginals.A + 1

    while True:
        picks = residual.argmax(axis=1)
        tops = residual[np.arange(marginals.R), picks]
        r = float(tops.min())
        if r <= tolerance:
            break
        if len(masses) >= max_steps:
            raise NumericalDriftError(f"greedy coupling did not terminate in {max_steps} steps")
        masses.append(r)
        choices.append(tuple(int(a) for a in picks))
        residual[np.arange(marginals.R), picks] -= r
        residual[residual < tolerance] = 0.0

    leftover = residual.sum(axis=1)
    if leftover.max() > drift_limit or abs(sum(masses) - 1.0) > drift_limit:
        raise NumericalDriftError(
            f"residual drift {leftover.max():.3g} exceeds {drift_limit:.1g}"
        )

    order = sorted(range(len(masses)), key=lambda t: (-masses[t], t))
    output = Pmf.from_masses([masses[t] for t in order], tolerance=drift_limit)
    maps = tuple(tuple(choices[t][i] for t in order) for i in range(marginals.R))
    logger.debug("greedy: R=%d A=%d → B=%d, H=%.6f", marginals.R, marginals.A, len(masses), entropy(output))
    return Coupling(output=output, recovery_maps=maps, emission_order=tuple(order))


## ────────────── Перебор вершин многогранника связок ──────────────
def coupling_constraints(
    marginals: MarginalSet,
    tolerance: float,
) -> tuple[list[tuple[int, ...]], np.ndarray, np.ndarray]:
    """
    Клетки — наборы (a_1, …, a_R) символов с положительной массой; x_c — масса клетки.
    Строки Σ_{c: c_i = a} x_c = α_{ia}; по одной строке источников 2..R отброшено (линейно зависимы).
    """
    m = marginals.matrix()
    positive = [np.flatnonzero(row > tolerance) for row in m]
    cells = list(itertools.product(*[[int(a) for a in symbols] for symbols in positive]))
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    for i, symbols in enumerate(positive):
        kept = symbols if i == 0 else symbols[:-1]
        column = np.array([c[i] for c in cells])
        for a in kept:
            rows.append((column == a).astype(float))
            rhs.append(m[i, a])
    return cells, np.vstack(rows), np.asarray(rhs)


def _start_basis(
    marginals: MarginalSet,
    cells: list[tuple[int, ...]],
    matrix: np.ndarray,
    tolerance: float,
) -> tuple[int, ...]:
    """Опора жадной связки (её столбцы независимы), дополненная до базиса."""
    index = {c: j for j, c in enumerate(cells)}
    greedy = greedy_mec(marginals, tolerance=tolerance)
    basis = [index[c] for c in greedy.support_cells()]
    size = matrix.shape[0]
    for j in range(len(cells)):
        if len(basis) == size:
            break
        if j in basis:
            continue
        if np.linalg.matrix_rank(matrix[:, basis + [j]]) == len(basis) + 1:
            basis.append(j)
    if len(basis) != size:
        raise InnokitError("could not complete the greedy support to a basis")
    return tuple(sorted(basis))


def _lex_leaving(rows: np.ndarray, d: np.ndarray, tolerance: float) -> int | None:
    """
    Позиция базиса, покидающая его при входе столбца с направлением d.

    rows — строки [x_B | B⁻¹B₀]: правая часть, возмущённая столбцами стартового
    базиса B₀. Лексикографический минимум отношений единственен, поэтому каждый
    базис соответствует ровно одной вершине возмущённого многогранника.
    """
    candidates = np.flatnonzero(d > PIVOT_EPS)
    if candidates.size == 0:
        return None
    ratios = rows[candidates] / d[candidates, None]
    for k in range(ratios.shape[1]):
        column = ratios[:, k]
        keep = column <= column.min() + tolerance
        candidates, ratios = candidates[keep], ratios[keep]
        if candidates.size == 1:
            break
    return int(candidates[0])


@lru_cache(maxsize=128)
def _vertices_of(
    marginals: MarginalSet,
    work_limit: int,
    tolerance: float,
) -> tuple[Coupling, ...]:
    cells, matrix, rhs = coupling_constraints(marginals, tolerance)
    start = _start_basis(marginals, cells, matrix, tolerance)
    origin = matrix[:, list(start)]
    queue: deque[tuple[int, ...]] = deque([start])
    seen = {start}
    found: dict[frozenset[int], tuple[np.ndarray, tuple[int, ...]]] = {}
    all_columns = np.arange(len(cells))

    while queue:
        basis = queue.popleft()
        columns = list(basis)
        try:
            inverse = np.linalg.inv(matrix[:, columns])
        except np.linalg.LinAlgError:
            continue
        x = inverse @ rhs
        if np.any(x < -tolerance):
            continue
        x = np.clip(x, 0.0, None)
        support = tuple(basis[k] for k in range(len(basis)) if x[k] > tolerance)
        key = frozenset(support)
        if key not in found:
            found[key] = (x[x > tolerance], support)

        nonbasic = np.setdiff1d(all_columns, columns)
        if nonbasic.size == 0:
            continue
        rows = np.column_stack([x, inverse @ origin])
        directions = inverse @ matrix[:, nonbasic]
        for col, entering in enumerate(nonbasic):
            leaving = _lex_leaving(rows, directions[:, col], tolerance)
            if leaving is None:
                continue
            nxt = tuple(sorted(basis[:leaving] + basis[leaving + 1:] + (int(entering),)))
            if nxt in seen:
                continue
            seen.add(nxt)
            if len(seen) > work_limit:
                raise WorkLimitExceeded(work_limit)
            queue.append(nxt)

    couplings: list[Coupling] = []
    for masses, support in found.values():
        order = sorted(range(len(support)), key=lambda k: (-masses[k], cells[support[k]]))
        output = Pmf.from_masses([masses[k] for k in order], tolerance=config.DRIFT_LIMIT)
        maps = tuple(
            tuple(cells[support[k]][i] for k in order) for i in range(marginals.R)
        )
        coupling = Coupling(output=output, recovery_maps=maps)
        problems = check_coupling(marginals, coupling, tolerance=config.DRIFT_LIMIT)
        if problems:
            logger.warning("⚠️ Вершина отброшена: %s", "; ".join(problems))
            continue
        couplings.append(coupling)

    couplings.sort(key=_coupling_key)
    logger.debug("vertex enumeration: %d bases, %d vertices", len(seen), len(couplings))
    return tuple(couplings)


def _coupling_key(coupling: Coupling) -> tuple[float, tuple[tuple[int, ...], ...]]:
    return (round(coupling.entropy, 12), tuple(sorted(coupling.support_cells())))


def enumerate_vertices(
    marginals: MarginalSet,
    work_limit: int = config.WORK_LIMIT,
    tolerance: float = config.TOLERANCE,
) -> tuple[Coupling, ...]:
    """
    Все вершины многогранника связок без потерь, по возрастанию энтропии.

    Обход идёт по допустимым базисам от опоры жадной связки с лексикографическим
    правилом выбора, так что вырожденная вершина не размножается на все свои
    базисы; единица работы — просмотренный базис (кандидат-опора). Набор
    приводится к канонической форме, карты восстановления возвращаются в
    исходной нумерации.
    """
    canon, symbol_orders, source_order = marginals.canonical()
    vertices = _vertices_of(canon, int(work_limit), float(tolerance))
    restored = [
        Coupling(
            output=v.output,
            recovery_maps=decanonicalize_maps(v.recovery_maps, symbol_orders, source_order),
        )
        for v in vertices
    ]
    restored.sort(key=_coupling_key)
    return tuple(restored)


def identical_sources(marginals: MarginalSet, tolerance: float = config.TOLERANCE) -> bool:
    m = marginals.matrix()
    return bool(np.all(np.abs(m - m[0]) <= tolerance))


def common_source_coupling(marginals: MarginalSet, tolerance: float = config.TOLERANCE) -> Coupling:
    """Связка одинаковых источников: выход — общий закон, каждая карта тождественна."""
    masses = marginals.matrix()[0]
    symbols = sorted(np.flatnonzero(masses > tolerance), key=lambda a: (-masses[a], a))
    output = Pmf.from_masses([masses[a] for a in symbols], tolerance=config.DRIFT_LIMIT)
    maps = tuple(tuple(int(a) for a in symbols) for _ in range(marginals.R))
    return Coupling(output=output, recovery_maps=maps)


def exhaustive_mec(
    marginals: MarginalSet,
    B: int,
    work_limit: int = config.WORK_LIMIT,
    tolerance: float = config.TOLERANCE,
) -> Coupling:
    """
    Связка минимальной энтропии среди связок не более чем с B выходными символами.

    Одинаковые источники перебора не требуют: ответ — сам общий закон.
    """
    if B < 1:
        raise ValidationError(f"B must be positive, got {B}")
    if identical_sources(marginals, tolerance):
        common = common_source_coupling(marginals, tolerance)
        if common.B > B:
            raise InfeasibleError(f"no lossless coupling with at most {B} output symbols")
        logger.info("🔎 Точная MEC: источники совпадают, H=%.9f", common.entropy)
        return common
    feasible = [v for v in enumerate_vertices(marginals, work_limit, tolerance) if v.B <= B]
    if not feasible:
        raise InfeasibleError(f"no lossless coupling with at most {B} output symbols")
    best = feasible[0]
    logger.info("🔎 Точная MEC: B≤%d, H=%.9f (вершин %d)", B, best.entropy, len(feasible))
    return best


## ────────────── Границы и нижняя оценка ──────────────
def beta_bounds(
    marginals: MarginalSet,
    B: int,
    work_limit: int = config.WORK_LIMIT,
    tolerance: float = config.TOLERANCE,
) -> BoxBounds:
    """Огибающая отсортированных по возрастанию выходов всех допустимых вершин с ≤ B символами."""
    rows = [
        np.sort(np.pad(v.output.as_array(), (0, B - v.B)))
        for v in enumerate_vertices(marginals, work_limit, tolerance)
        if v.B <= B
    ]
    if not rows:
        raise InfeasibleError(f"no lossless coupling with at most {B} output symbols")
    stacked = np.vstack(rows)
    return BoxBounds(
        lower=tuple(float(v) for v in stacked.min(axis=0)),
        upper=tuple(float(v) for v in stacked.max(axis=0)),
    )


def min_entropy_box(bounds: BoxBounds, tolerance: float = config.TOLERANCE) -> Pmf:
    """
    Минимум энтропии на {a ≤ β ≤ b, Σβ = 1}.

    Сверху вниз: β_i = min(b_i, 1 − Σ назначенных − Σ_{j<i} a_j). Выше опорного
    индекса β_i = b_i, ниже — a_i, опорный забирает остаток.
    """
    if not bounds.is_feasible(tolerance):
        raise InfeasibleError(
            f"box is infeasible: sum(lower)={sum(bounds.lower):.6g}, sum(upper)={sum(bounds.upper):.6g}"
        )
    lower = np.asarray(bounds.lower, dtype=float)
    upper = np.asarray(bounds.upper, dtype=float)
    below = np.concatenate([[0.0], np.cumsum(lower)])
    beta = np.zeros(bounds.size)
    assigned = 0.0
    for i in range(bounds.size - 1, -1, -1):
        beta[i] = max(min(upper[i], 1.0 - assigned - below[i]), lower[i])
        assigned += beta[i]
    return Pmf.from_masses(beta, tolerance=max(tolerance, config.DRIFT_LIMIT))


def mec_lower_bound(
    marginals: MarginalSet,
    work_limit: int = config.WORK_LIMIT,
    tolerance: float = config.TOLERANCE,
) -> Entropy:
    B = max_vertex_support(marginals)
    bounds = beta_bounds(marginals, B, work_limit, tolerance)
    return entropy(min_entropy_box(bounds, tolerance))


@dataclass(frozen=True)
class SandwichReport:
    bound: Entropy
    exact: Entropy
    greedy: Entropy

    @property
    def gap(self) -> float:
        return self.exact - self.bound

    def to_json(self) -> dict[str, Any]:
        return {"bound": self.bound, "exact": self.exact, "greedy": self.greedy, "gap": self.gap}


def sandwich_report(
    marginals: MarginalSet,
    work_limit: int = config.WORK_LIMIT,
    tolerance: float = config.TOLERANCE,
) -> SandwichReport:
    """Нижняя оценка, точный оптимум и жадная связка на одном наборе."""
    B = max_vertex_support(marginals)
    return SandwichReport(
        bound=mec_lower_bound(marginals, work_limit, tolerance),
        exact=exhaustive_mec(marginals, B, work_limit, tolerance).entropy,
        greedy=greedy_mec(marginals, tolerance).entropy,
    )
