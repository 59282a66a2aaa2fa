"""
Точность энтропийного теста направления на синтетических данных Y = g(X, E).

Пример:
    python -m scripts.causal_benchmark --trials 100 --samples 10000
"""
from __future__ import annotations

import argparse
import logging
from collections import Counter

import config
from services.causal import METHODS, STATISTICS, estimate_joint, infer_direction, sample_mechanism_pairs
from services.distributions import make_rng
from utils.logging_config import setup_logging

logger = logging.getLogger(__name__)


def run_benchmark(
    trials: int,
    samples: int,
    seed: int,
    *,
    x_size: int = 10,
    y_size: int = 10,
    e_size: int = 2,
    method: str = "greedy",
    statistic: str = "entropy_of_e",
) -> Counter:
    """Счётчик решений по испытаниям; правильный ответ — X→Y."""
    rng = make_rng(seed)
    outcomes: Counter = Counter()
    for _ in range(trials):
        pairs = sample_mechanism_pairs(rng, samples, x_size, y_size, e_size)
        verdict = infer_direction(estimate_joint(pairs), method=method, statistic=statistic)
        outcomes[verdict.direction] += 1
    return outcomes


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Синтетический бенчмарк теста направления причинности")
    parser.add_argument("--trials", type=int, default=100, help="Число испытаний")
    parser.add_argument("--samples", type=int, default=10_000, help="Пар в одном испытании")
    parser.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    parser.add_argument("--x-size", type=int, default=10)
    parser.add_argument("--y-size", type=int, default=10)
    parser.add_argument("--e-size", type=int, default=2)
    parser.add_argument("--method", choices=METHODS, default="greedy")
    parser.add_argument("--statistic", choices=STATISTICS, default="entropy_of_e")
    return parser.parse_args()


def main() -> None:
    setup_logging("ERROR")
    args = parse_args()
    outcomes = run_benchmark(
        args.trials, args.samples, args.seed,
        x_size=args.x_size, y_size=args.y_size, e_size=args.e_size,
        method=args.method, statistic=args.statistic,
    )
    correct = outcomes["X→Y"]
    print(f"🧪 Испытаний: {args.trials}, пар в испытании: {args.samples}")
    for direction in ("X→Y", "Y→X", "undecided"):
        print(f"  {direction:>9}: {outcomes[direction]}")
    print(f"✅ Точность: {correct / max(args.trials, 1):.1%}")


if __name__ == "__main__":
    main()
