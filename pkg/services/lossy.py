"""
Потерьное инновационное представление для бинарных марковских процессов.

Для каждой истории X_{k-1} строится канал P(Y|X) с заданным маргиналом
Y ∼ Ber(β), максимизирующий взаимную информацию; затем выбирается β,
максимизирующий взвешенную сумму по историям.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

import config
from services.distributions import Entropy, binary_entropy, mutual_information
from services.errors import ValidationError

logger = logging.getLogger(__name__)

# candidates closer than this to the best objective count as tied
TIE_TOLERANCE = 1e-12


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0 or np.isnan(value):
        raise ValidationError(f"{name} must lie in [0, 1], got {value}")
    return value


## ────────────── Бинарный канал ──────────────
@dataclass(frozen=True)
class BinaryChannelResult:
    """
    Оптимальный канал для X ∼ Ber(alpha) и Y ∼ Ber(beta).

    alpha и beta — вероятности символа 0. conditionals[x][y] = P(Y=y | X=x),
    joint[x][y] = P(X=x, Y=y). relabeled_* отмечают переобозначение символов,
    сделанное для приведения параметров к значениям ≤ 1/2.
    """

    alpha: float
    beta: float
    mi: Entropy
    conditionals: np.ndarray
    joint: np.ndarray
    relabeled_x: bool
    relabeled_y: bool

    def to_json(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "mi": self.mi,
            "conditionals": self.conditionals.tolist(),
            "joint": self.joint.tolist(),
            "relabeled_x": self.relabeled_x,
            "relabeled_y": self.relabeled_y,
        }


def _max_mi_canonical(a: float, b: float) -> float:
    if b <= a and a > 0:
        return binary_entropy(b) - a * binary_entropy(b / a)
    return binary_entropy(b) - (1.0 - a) * binary_entropy((b - a) / (1.0 - a))


def max_mi_binary(alpha: float, beta: float) -> BinaryChannelResult:
    """
    Максимальная взаимная информация между Ber(alpha) и Ber(beta).

    После приведения к a, b ≤ 1/2:
      b < a: I = h(b) − a·h(b/a)
      b > a: I = h(b) − (1−a)·h((b−a)/(1−a))
      b = a: I = h(a)
    """
    alpha = _check_prob("alpha", alpha)
    beta = _check_prob("beta", beta)
    relabel_x, relabel_y = alpha > 0.5, beta > 0.5
    a = 1.0 - alpha if relabel_x else alpha
    b = 1.0 - beta if relabel_y else beta

    if b <= a:
        joint = np.array([[b, a - b], [0.0, 1.0 - a]])
    else:
        joint = np.array([[a, 0.0], [b - a, 1.0 - b]])
    mi = max(_max_mi_canonical(a, b), 0.0)

    if relabel_x:
        joint = joint[::-1, :]
    if relabel_y:
        joint = joint[:, ::-1]
    joint = np.ascontiguousarray(joint)
    rows = joint.sum(axis=1, keepdims=True)
    y_marginal = joint.sum(axis=0)
    conditionals = np.where(rows > 0, joint / np.where(rows > 0, rows, 1.0), y_marginal)

    return BinaryChannelResult(
        alpha=alpha,
        beta=beta,
        mi=mi,
        conditionals=conditionals,
        joint=joint,
        relabeled_x=relabel_x,
        relabeled_y=relabel_y,
    )


## ────────────── Марковские процессы ──────────────
@dataclass(frozen=True)
class MarkovSpec:
    """
    Бинарный марковский процесс порядка r.

    alphas[j] = P(X_k = 0 | история j); gammas[j] — вес истории j.
    Для первого порядка alphas = (α1, α2): α1 = P(0|0), α2 = P(0|1).
    """

    alphas: tuple[float, ...]
    gammas: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.alphas) < 1:
            raise ValidationError("markov spec needs at least one alpha")
        for a in self.alphas:
            _check_prob("alpha", a)
        if self.gammas is not None:
            if len(self.gammas) != len(self.alphas):
                raise ValidationError(
                    f"{len(self.alphas)} alphas but {len(self.gammas)} gammas"
                )
            for g in self.gammas:
                _check_prob("gamma", g)
            if abs(sum(self.gammas) - 1.0) > config.TOLERANCE:
                raise ValidationError(f"gammas sum to {sum(self.gammas):.12g}, expected 1")

    @classmethod
    def from_json(cls, payload: dict[str, Any]) -> "MarkovSpec":
        if not isinstance(payload, dict) or "alphas" not in payload:
            raise ValidationError('markov spec JSON must have an "alphas" field')
        gammas = payload.get("gammas")
        return cls(
            alphas=tuple(float(a) for a in payload["alphas"]),
            gammas=None if gammas is None else tuple(float(g) for g in gammas),
        )

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {"alphas": list(self.alphas)}
        if self.gammas is not None:
            data["gammas"] = list(self.gammas)
        return data

    @property
    def order_count(self) -> int:
        return len(self.alphas)

    def with_gamma(self, gamma: float) -> "MarkovSpec":
        if self.order_count != 2:
            raise ValidationError("a single gamma only applies to a first-order spec")
        gamma = _check_prob("gamma", gamma)
        return MarkovSpec(alphas=self.alphas, gammas=(gamma, 1.0 - gamma))

    def weights(self) -> np.ndarray:
        if self.gammas is None:
            raise ValidationError("markov spec has no history weights")
        return np.asarray(self.gammas, dtype=float)


def markov_r_objective(spec: MarkovSpec, beta: float) -> Entropy:
    """Σ_j γ_j · I_max(α_j, β)."""
    beta = _check_prob("beta", beta)
    weights = spec.weights()
    values = [max_mi_binary(a, beta).mi for a in spec.alphas]
    return float(np.dot(weights, values))


def markov1_objective(spec: MarkovSpec, gamma: float, beta: float) -> Entropy:
    return markov_r_objective(spec.with_gamma(gamma), beta)


def markov_channels(spec: MarkovSpec, beta: float) -> list[BinaryChannelResult]:
    return [max_mi_binary(a, beta) for a in spec.alphas]


def _best_candidate(spec: MarkovSpec) -> tuple[float, Entropy]:
    values = np.array([markov_r_objective(spec, a) for a in spec.alphas])
    best = int(np.flatnonzero(values >= values.max() - TIE_TOLERANCE)[0])
    return float(spec.alphas[best]), float(values[best])


def markov1_optimal_beta(spec: MarkovSpec, gamma: float) -> tuple[float, Entropy]:
    """
    Оптимальный β для процесса первого порядка при весе γ истории X_{k-1}=0.

    Максимум целевой функции лежит на одном из α_j; оба кандидата вычисляются,
    при равенстве выбирается кандидат с меньшим индексом.
    """
    beta, mi = _best_candidate(spec.with_gamma(gamma))
    logger.debug("markov1: alphas=%s gamma=%.6g → beta=%.6g, I=%.6g", spec.alphas, gamma, beta, mi)
    return beta, mi


def markov_r_optimal_beta(spec: MarkovSpec) -> tuple[float, Entropy]:
    if spec.order_count < 2:
        raise ValidationError("markov-r needs at least two histories")
    return _best_candidate(spec)


## ────────────── Стационарный режим ──────────────
def stationary_weight(alpha1: float, alpha2: float) -> float:
    """Стационарная вероятность P(X=0) = α2 / (1 − α1 + α2)."""
    alpha1 = _check_prob("alpha1", alpha1)
    alpha2 = _check_prob("alpha2", alpha2)
    denominator = 1.0 - alpha1 + alpha2
    if denominator <= 0:
        raise ValidationError("chain has no unique stationary law")
    return alpha2 / denominator


def _rule_applies(alpha1: float, alpha2: float) -> bool:
    # переименование X переводит (α1, α2) в (1−α2, 1−α1)
    return alpha1 <= alpha2 <= 0.5 or 0.5 <= alpha1 <= alpha2


def stationary_optimal_beta(
    alpha1: float,
    alpha2: float,
    *,
    tolerance: float = config.TOLERANCE,
) -> float:
    """
    Оптимальный β эргодической цепи первого порядка при стационарном γ.

    Если α1 ≤ α2 лежат по одну сторону от 1/2 (с точностью до переименования
    состояний X это случай α1 ≤ α2 ≤ 1/2), из {α1, α2, 1−α1, 1−α2} берётся
    значение, ближайшее к 1/2. Иначе правило не действует и оба кандидата
    сравниваются напрямую, как в markov1_optimal_beta.
    """
    alpha1 = _check_prob("alpha1", alpha1)
    alpha2 = _check_prob("alpha2", alpha2)
    if alpha1 >= 1.0 - tolerance or alpha2 <= tolerance:
        raise ValidationError(
            f"chain with alpha1={alpha1}, alpha2={alpha2} has an absorbing state"
        )
    if not _rule_applies(alpha1, alpha2):
        beta, _ = markov1_optimal_beta(MarkovSpec(alphas=(alpha1, alpha2)), stationary_weight(alpha1, alpha2))
        return beta
    candidates = np.array([alpha1, alpha2, 1.0 - alpha1, 1.0 - alpha2])
    distance = np.abs(0.5 - candidates)
    best = int(np.flatnonzero(distance <= distance.min() + TIE_TOLERANCE)[0])
    return float(candidates[best])


def decision_threshold(alpha1: float, alpha2: float) -> float:
    """
    Вес γ, при котором кандидаты β=α1 и β=α2 дают одинаковую информацию.

    При γ выше порога выигрывает α1, ниже — α2. Требуется 0 ≤ α1 < α2 ≤ 1/2.
    """
    if not 0.0 <= alpha1 < alpha2 <= 0.5:
        raise ValidationError(f"threshold needs 0 <= alpha1 < alpha2 <= 1/2, got {alpha1}, {alpha2}")
    below = alpha2 * binary_entropy(alpha1 / alpha2)
    above = (1.0 - alpha1) * binary_entropy((alpha2 - alpha1) / (1.0 - alpha1))
    numerator = binary_entropy(alpha2) - binary_entropy(alpha1) + below
    return numerator / (below + above)


def stationary_rule_holds(alpha1: float, alpha2: float) -> bool:
    """Стационарный вес строго ниже порога решения, т.е. в стационаре оптимален β = α2."""
    if not 0.0 < alpha1 < alpha2 < 0.5:
        raise ValidationError(f"inequality needs 0 < alpha1 < alpha2 < 1/2, got {alpha1}, {alpha2}")
    return stationary_weight(alpha1, alpha2) < decision_threshold(alpha1, alpha2)


def implied_joint_mi(channels: Sequence[BinaryChannelResult], weights: Sequence[float]) -> Entropy:
    """Взвешенная сумма I по явно построенным совместным матрицам."""
    return float(sum(w * mutual_information(c.joint) for c, w in zip(channels, weights)))
