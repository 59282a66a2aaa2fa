"""
Точное инновационное представление для непрерывных и смешанных алфавитов.

Каждое X_k приводится к Unif[0,1] через условную функцию распределения
(с рандомизацией θ на атомах), затем переводится в целевой закон через
обобщённую обратную функцию. Обратный проход восстанавливает X_k по Y_k и θ.
"""
from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy import special, stats

from services.distributions import RngSeed, make_rng
from services.errors import ValidationError

logger = logging.getLogger(__name__)

# offset for the neighbouring quantile candidates during recovery
RECOVERY_NUDGE = 1e-9


## ────────────── Формирующие функции распределения ──────────────
class ShapingCdf(ABC):
    """Закон на прямой: F, обобщённая обратная и массы атомов."""

    @abstractmethod
    def cdf(self, x: Any) -> np.ndarray: ...

    @abstractmethod
    def quantile(self, u: Any) -> np.ndarray:
        """inf{x : F(x) ≥ u}."""

    def mass(self, x: Any) -> np.ndarray:
        return np.zeros_like(np.asarray(x, dtype=float))

    @property
    def has_atoms(self) -> bool:
        return False

    @abstractmethod
    def in_support(self, x: Any) -> np.ndarray: ...

    @abstractmethod
    def to_json(self) -> dict[str, Any]: ...


class PiecewiseCdf(ShapingCdf):
    """
    Кусочно-линейная непрерывная часть G плюс атомы: F(x) = G(x) + Σ_{a ≤ x} P(a).

    knots задают G (неубывающие значения, первое равно 0), atoms — пары (точка, масса).
    Полная масса G(последний узел) + Σ масс атомов должна равняться 1.
    """

    def __init__(
        self,
        knots: Sequence[Sequence[float]] = (),
        atoms: Sequence[Sequence[float]] = (),
        *,
        tolerance: float = 1e-9,
    ) -> None:
        kx = np.asarray([k[0] for k in knots], dtype=float)
        kg = np.asarray([k[1] for k in knots], dtype=float)
        ax = np.asarray([a[0] for a in atoms], dtype=float)
        am = np.asarray([a[1] for a in atoms], dtype=float)

        if kx.size == 0 and ax.size == 0:
            raise ValidationError("cdf needs knots or atoms")
        if kx.size == 1:
            raise ValidationError("continuous part needs at least two knots")
        if kx.size and (np.any(np.diff(kx) <= 0) or np.any(np.diff(kg) < 0)):
            raise ValidationError("knots must have increasing points and nondecreasing cdf values")
        if kx.size and abs(kg[0]) > tolerance:
            raise ValidationError(f"continuous part must start at 0, got {kg[0]}")
        if np.any(am < 0):
            raise ValidationError("atom masses must be nonnegative")
        order = np.argsort(ax, kind="stable")
        ax, am = ax[order], am[order]
        if ax.size and np.any(np.diff(ax) == 0):
            raise ValidationError("duplicate atom points")

        continuous_mass = float(kg[-1]) if kg.size else 0.0
        total = continuous_mass + float(am.sum())
        if abs(total - 1.0) > tolerance:
            raise ValidationError(f"cdf total mass is {total:.12g}, expected 1")
        if kg.size:
            kg = kg / total
        am = am / total

        self._kx, self._kg = kx, kg
        self._ax, self._am = ax, am
        self._a_cum = np.concatenate([[0.0], np.cumsum(am)])
        self._g_end = float(kg[-1]) if kg.size else 0.0
        # breakpoints z_j with F(z_j−) and F(z_j); F is linear between consecutive z_j
        z = np.union1d(kx, ax)
        left = self._g(z) + self._atoms_below(z, strict=True)
        right = left + self.mass(z)
        self._z = z
        self._levels = np.column_stack([left, right]).ravel()
        self._levels[-1] = 1.0

    def _g(self, x: np.ndarray) -> np.ndarray:
        if self._kx.size == 0:
            return np.zeros_like(x)
        return np.interp(x, self._kx, self._kg, left=0.0, right=self._g_end)

    def _atoms_below(self, x: np.ndarray, strict: bool = False) -> np.ndarray:
        idx = np.searchsorted(self._ax, x, side="left" if strict else "right")
        return self._a_cum[idx]

    def cdf(self, x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.clip(self._g(x) + self._atoms_below(x), 0.0, 1.0)

    def mass(self, x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self._ax.size == 0:
            return np.zeros_like(x)
        idx = np.clip(np.searchsorted(self._ax, x), 0, self._ax.size - 1)
        return np.where(self._ax[idx] == x, self._am[idx], 0.0)

    @property
    def has_atoms(self) -> bool:
        return bool(np.any(self._am > 0))

    def quantile(self, u: Any) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        k = np.clip(np.searchsorted(self._levels, u, side="left"), 0, self._levels.size - 1)
        j = k // 2
        on_atom = (k % 2 == 1) | (j == 0)
        prev = np.maximum(j - 1, 0)
        lo_level = self._levels[2 * prev + 1]
        hi_level = self._levels[2 * j]
        span = np.where(hi_level > lo_level, hi_level - lo_level, 1.0)
        frac = np.clip((u - lo_level) / span, 0.0, 1.0)
        inside = self._z[prev] + frac * (self._z[j] - self._z[prev])
        return np.where(on_atom, self._z[j], inside)

    def in_support(self, x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = np.zeros(x.shape, dtype=bool)
        if self._kx.size:
            inside |= (x >= self._kx[0]) & (x <= self._kx[-1])
        return inside | (self.mass(x) > 0)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": "piecewise",
            "knots": [[float(a), float(b)] for a, b in zip(self._kx, self._kg)],
            "atoms": [[float(a), float(m)] for a, m in zip(self._ax, self._am)],
        }

    def __repr__(self) -> str:
        return f"PiecewiseCdf(knots={self._kx.size}, atoms={self._ax.size})"


class ScipyCdf(ShapingCdf):
    """Непрерывный закон из scipy.stats (замороженный объект)."""

    def __init__(self, family: str, params: dict[str, float] | None = None) -> None:
        law = getattr(stats, family, None)
        if not isinstance(law, stats.rv_continuous):
            raise ValidationError(f"unknown continuous scipy family: {family!r}")
        self.family = family
        self.params = dict(params or {})
        try:
            self._frozen = law(**self.params)
            self._lo, self._hi = self._frozen.support()
        except TypeError as e:
            raise ValidationError(f"bad parameters for {family}: {e}") from e

    def cdf(self, x: Any) -> np.ndarray:
        return np.asarray(self._frozen.cdf(x), dtype=float)

    def quantile(self, u: Any) -> np.ndarray:
        return np.asarray(self._frozen.ppf(u), dtype=float)

    def in_support(self, x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x >= self._lo) & (x <= self._hi)

    def to_json(self) -> dict[str, Any]:
        return {"kind": "scipy", "family": self.family, "params": self.params}

    def __repr__(self) -> str:
        return f"ScipyCdf({self.family}, {self.params})"


@dataclass(frozen=True)
class GaussianCdf(ShapingCdf):
    """N(loc, scale²) через ndtr/ndtri."""

    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise ValidationError(f"gaussian scale must be positive, got {self.scale}")

    def cdf(self, x: Any) -> np.ndarray:
        return special.ndtr((np.asarray(x, dtype=float) - self.loc) / self.scale)

    def quantile(self, u: Any) -> np.ndarray:
        return self.loc + self.scale * special.ndtri(np.asarray(u, dtype=float))

    def in_support(self, x: Any) -> np.ndarray:
        return np.isfinite(np.asarray(x, dtype=float))

    def to_json(self) -> dict[str, Any]:
        return {"kind": "gaussian", "loc": self.loc, "scale": self.scale}


def shaping_cdf_from_json(payload: dict[str, Any]) -> ShapingCdf:
    if not isinstance(payload, dict):
        raise ValidationError("cdf JSON must be an object")
    kind = payload.get("kind", "piecewise")
    if kind == "piecewise":
        return PiecewiseCdf(payload.get("knots", ()), payload.get("atoms", ()))
    if kind == "scipy":
        return ScipyCdf(payload["family"], payload.get("params"))
    if kind == "gaussian":
        return GaussianCdf(float(payload.get("loc", 0.0)), float(payload.get("scale", 1.0)))
    raise ValidationError(f"unknown cdf kind: {kind!r}")


def uniform_cdf(low: float = 0.0, high: float = 1.0) -> PiecewiseCdf:
    return PiecewiseCdf(knots=[(low, 0.0), (high, 1.0)])


def bernoulli_cdf(p_zero: float) -> PiecewiseCdf:
    """Закон на {0, 1} с P(0) = p_zero."""
    return PiecewiseCdf(atoms=[(0.0, p_zero), (1.0, 1.0 - p_zero)])


## ────────────── Условная модель ──────────────
HistoryKey = tuple[float, ...]
INITIAL = "initial"


@dataclass
class ConditionalModel:
    """
    Условные законы X_k по прошлому.

    Либо таблица (ключ — последние order значений), либо kernel — функция
    истории → ShapingCdf. initial используется, пока прошлое короче order.
    """

    initial: ShapingCdf | None = None
    table: dict[HistoryKey, ShapingCdf] = field(default_factory=dict)
    order: int = 0
    kernel: Callable[[HistoryKey], ShapingCdf] | None = None

    def __post_init__(self) -> None:
        if self.order < 0:
            raise ValidationError("model order must be nonnegative")
        if self.kernel is None and self.initial is None and not self.table:
            raise ValidationError("model needs an initial law, a table or a kernel")

    @classmethod
    def memoryless(cls, law: ShapingCdf) -> "ConditionalModel":
        return cls(initial=law, order=0)

    def key(self, history: Sequence[float]) -> HistoryKey:
        if self.order == 0:
            return ()
        return tuple(float(v) for v in history[-self.order:])

    def table_key(self, history: Sequence[float]) -> HistoryKey | str:
        """Ключ табличного закона; INITIAL — пока прошлое короче order и в таблице его нет."""
        key = self.key(history)
        if self.order == 0 or (len(history) < self.order and key not in self.table):
            return INITIAL
        return key

    def laws(self) -> dict[HistoryKey | str, ShapingCdf]:
        laws: dict[HistoryKey | str, ShapingCdf] = dict(self.table)
        if self.initial is not None:
            laws[INITIAL] = self.initial
        return laws

    def resolve(self, history: Sequence[float]) -> ShapingCdf:
        if self.kernel is not None:
            return self.kernel(self.key(history))
        key = self.table_key(history)
        if key == INITIAL and self.initial is not None:
            return self.initial
        try:
            return self.table[key]
        except KeyError:
            raise ValidationError(f"unresolvable history {self.key(history)}") from None

    @property
    def has_atoms(self) -> bool:
        laws = list(self.table.values()) + ([self.initial] if self.initial is not None else [])
        return any(law.has_atoms for law in laws)

    @classmethod
    def from_json(cls, payload: dict[str, Any]) -> "ConditionalModel":
        """
        Формат: либо один закон ({"kind": ...}), либо
        {"order": r, "initial": {...}, "table": [{"history": [...], "cdf": {...}}, ...]}.
        """
        if not isinstance(payload, dict):
            raise ValidationError("model JSON must be an object")
        if "table" not in payload:
            return cls.memoryless(shaping_cdf_from_json(payload))
        order = int(payload.get("order", 1))
        table: dict[HistoryKey, ShapingCdf] = {}
        for entry in payload["table"]:
            key = tuple(float(v) for v in entry["history"])
            if len(key) != order:
                raise ValidationError(f"history {key} does not match order {order}")
            table[key] = shaping_cdf_from_json(entry["cdf"])
        initial = payload.get("initial")
        return cls(
            initial=shaping_cdf_from_json(initial) if initial is not None else None,
            table=table,
            order=order,
        )

    def to_json(self) -> dict[str, Any]:
        if self.kernel is not None:
            raise ValidationError("kernel models have no JSON form")
        if self.order == 0 and self.initial is not None:
            return self.initial.to_json()
        data: dict[str, Any] = {
            "order": self.order,
            "table": [{"history": list(k), "cdf": law.to_json()} for k, law in self.table.items()],
        }
        if self.initial is not None:
            data["initial"] = self.initial.to_json()
        return data


## ────────────── Преобразования одного шага ──────────────
def to_uniform(x: Any, model: ShapingCdf, theta: Any) -> np.ndarray | float:
    """F(x) − θ·P(x): равномерно распределено при θ ∼ Unif[0,1], независимом от x."""
    x_arr = np.asarray(x, dtype=float)
    theta_arr = np.asarray(theta, dtype=float)
    if np.any((theta_arr < 0) | (theta_arr > 1)):
        raise ValidationError("theta must lie in [0, 1]")
    if not np.all(model.in_support(x_arr)):
        raise ValidationError(f"value outside the support of {model!r}")
    u = np.clip(model.cdf(x_arr) - theta_arr * model.mass(x_arr), 0.0, 1.0)
    return float(u) if u.ndim == 0 else u


def from_uniform(u: Any, model: ShapingCdf) -> np.ndarray | float:
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr < 0) | (u_arr > 1)) or np.any(np.isnan(u_arr)):
        raise ValidationError("u must lie in [0, 1]")
    x = model.quantile(u_arr)
    return float(x) if np.ndim(x) == 0 else x


## ────────────── Инновационный процесс ──────────────
@dataclass(frozen=True)
class Innovation:
    ys: np.ndarray
    thetas: np.ndarray
    has_atoms: bool
    seed: RngSeed


def innovate(
    x_seq: Sequence[float] | np.ndarray,
    model: ConditionalModel,
    target: ShapingCdf,
    seed: RngSeed,
) -> Innovation:
    """
    Y_k = F_target^{-1}( F(X_k | прошлое) − θ_k P(X_k | прошлое) ).

    θ_k выбираются на каждом шаге из генератора с заданным seed и сохраняются.
    """
    x = np.asarray(x_seq, dtype=float)
    if x.ndim != 1:
        raise ValidationError("input sequence must be one-dimensional")
    rng = make_rng(seed)
    thetas = rng.random(x.size)
    u = np.empty(x.size, dtype=float)
    has_atoms = False

    if model.kernel is None:
        # the past is known up front, so steps sharing a law are shaped in one batch
        groups: dict[HistoryKey | str, list[int]] = {}
        for k in range(x.size):
            groups.setdefault(model.table_key(x[:k]), []).append(k)
        for idx in groups.values():
            rows = np.asarray(idx)
            law = model.resolve(x[:rows[0]])
            u[rows] = to_uniform(x[rows], law, thetas[rows])
            has_atoms |= law.has_atoms
    else:
        for k in range(x.size):
            law = model.resolve(x[:k])
            u[k] = to_uniform(x[k], law, thetas[k])
            has_atoms |= law.has_atoms

    ys = np.asarray(target.quantile(u), dtype=float)
    logger.info("🔁 Инновации построены: n=%d, атомы=%s, seed=%d", x.size, has_atoms, seed)
    return Innovation(ys=ys, thetas=thetas, has_atoms=has_atoms, seed=seed)


def _invert(law: ShapingCdf, u: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    nudged = np.stack([u, np.clip(u + RECOVERY_NUDGE, 0, 1), np.clip(u - RECOVERY_NUDGE, 0, 1)])
    candidates = law.quantile(nudged)
    forward = law.cdf(candidates) - thetas * law.mass(candidates)
    best = np.argmin(np.abs(forward - u), axis=0)
    return np.take_along_axis(candidates, best[None, :], axis=0)[0]


def recover(
    y_seq: Sequence[float] | np.ndarray,
    model: ConditionalModel,
    target: ShapingCdf,
    theta_stream: Sequence[float] | np.ndarray | None,
) -> np.ndarray:
    """Восстанавливает X_k по Y_k и записанным θ_k (точный обратный проход)."""
    y = np.asarray(y_seq, dtype=float)
    if theta_stream is None:
        if model.has_atoms:
            raise ValidationError("theta stream is required for a model with atoms")
        thetas = np.zeros(y.size)
    else:
        thetas = np.asarray(theta_stream, dtype=float)
    if thetas.shape != y.shape:
        raise ValidationError(f"stream lengths differ: {y.size} outputs vs {thetas.size} thetas")
    if target.has_atoms:
        raise ValidationError("target law must be atomless for exact recovery")
    u = np.clip(np.asarray(target.cdf(y), dtype=float), 0.0, 1.0)
    x = np.empty(y.size, dtype=float)

    if model.kernel is None:
        # every law inverted over the whole stream, then picked step by step
        candidates = {key: _invert(law, u, thetas) for key, law in model.laws().items()}
        for k in range(y.size):
            key = model.table_key(x[:k])
            if key not in candidates:
                raise ValidationError(f"unresolvable history {key} at step {k}")
            x[k] = candidates[key][k]
    else:
        for k in range(y.size):
            law = model.resolve(x[:k])
            x[k] = _invert(law, u[k:k + 1], thetas[k:k + 1])[0]

    logger.info("↩️ Восстановлено %d значений", y.size)
    return x
