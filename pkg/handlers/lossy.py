from __future__ import annotations

import argparse
import logging

from config import RunConfig
from handlers.common import CommandResult
from services.lossy import (
    MarkovSpec,
    markov1_optimal_beta,
    markov_channels,
    markov_r_optimal_beta,
    max_mi_binary,
    stationary_optimal_beta,
    stationary_weight,
)
from utils.io_helpers import load_json

## ────────────── Подкоманды lossy ──────────────
logger = logging.getLogger(__name__)


def handle_markov1(args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
    spec = MarkovSpec(alphas=(args.alpha1, args.alpha2))
    gamma = stationary_weight(args.alpha1, args.alpha2) if args.stationary else args.gamma
    beta, mi = markov1_optimal_beta(spec, gamma)
    payload: dict[str, object] = {"beta_opt": beta, "mi": mi, "gamma": gamma}
    if args.stationary:
        payload["stationary_rule_beta"] = stationary_optimal_beta(
            args.alpha1, args.alpha2, tolerance=run_config.tolerance
        )
    payload["channel"] = [c.to_json() for c in markov_channels(spec, beta)]
    return CommandResult(payload=payload)


def handle_markov_r(args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
    spec = MarkovSpec.from_json(load_json(args.spec))
    beta, mi = markov_r_optimal_beta(spec)
    return CommandResult(
        payload={
            "beta_opt": beta,
            "mi": mi,
            "channel": [c.to_json() for c in markov_channels(spec, beta)],
        }
    )


def handle_channel(args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
    return CommandResult(payload=max_mi_binary(args.alpha, args.beta).to_json())


def register(subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "lossy", help="Потерьное представление бинарных марковских процессов", parents=parents
    )
    actions = parser.add_subparsers(dest="action", required=True)

    markov1 = actions.add_parser("markov1", help="Оптимальный β для цепи первого порядка", parents=parents)
    markov1.add_argument("--alpha1", type=float, required=True, help="P(X_k=0 | X_{k-1}=0)")
    markov1.add_argument("--alpha2", type=float, required=True, help="P(X_k=0 | X_{k-1}=1)")
    weight = markov1.add_mutually_exclusive_group(required=True)
    weight.add_argument("--gamma", type=float, help="Вес истории X_{k-1}=0")
    weight.add_argument("--stationary", action="store_true", help="Взять стационарный вес")
    markov1.set_defaults(handler=handle_markov1)

    markov_r = actions.add_parser("markov-r", help="Оптимальный β для цепи порядка r", parents=parents)
    markov_r.add_argument("--spec", required=True, help='JSON {"alphas": [...], "gammas": [...]}')
    markov_r.set_defaults(handler=handle_markov_r)

    channel = actions.add_parser("channel", help="Максимальная I(X;Y) для Ber(α) и Ber(β)", parents=parents)
    channel.add_argument("--alpha", type=float, required=True)
    channel.add_argument("--beta", type=float, required=True)
    channel.set_defaults(handler=handle_channel)
