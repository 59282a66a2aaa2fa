from __future__ import annotations

import argparse
import logging

import pandas as pd

from config import RunConfig
from handlers.common import CommandResult
from services.continuous import ConditionalModel, ShapingCdf, innovate, recover, shaping_cdf_from_json
from utils.io_helpers import STDIN, load_json, numeric_column, read_table

## ────────────── Подкоманды continuous ──────────────
logger = logging.getLogger(__name__)


def _load_pair(args: argparse.Namespace) -> tuple[ConditionalModel, ShapingCdf]:
    model = ConditionalModel.from_json(load_json(args.model))
    target = shaping_cdf_from_json(load_json(args.target))
    return model, target


def handle_innovate(args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
    model, target = _load_pair(args)
    xs = numeric_column(read_table(args.input), "x")
    result = innovate(xs.to_numpy(), model, target, run_config.seed)

    frame = pd.DataFrame({"y": result.ys})
    payload: dict[str, object] = {"has_atoms": result.has_atoms, "ys": result.ys.tolist()}
    if result.has_atoms:
        frame["theta"] = result.thetas
        payload["thetas"] = result.thetas.tolist()
    return CommandResult(payload=payload, frame=frame, seed=result.seed, default_format="csv")


def handle_recover(args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
    model, target = _load_pair(args)
    table = read_table(args.input)
    ys = numeric_column(table, "y")
    thetas = numeric_column(table, "theta", required=False)
    xs = recover(
        ys.to_numpy(),
        model,
        target,
        None if thetas is None else thetas.to_numpy(),
    )
    return CommandResult(
        payload={"xs": xs.tolist()},
        frame=pd.DataFrame({"x": xs}),
        default_format="csv",
    )


def register(subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "continuous",
        help="Точное инновационное представление (непрерывные и смешанные законы)",
        parents=parents,
    )
    actions = parser.add_subparsers(dest="action", required=True)

    for name, handler, help_text in (
        ("innovate", handle_innovate, "X → Y: независимые инновации с законом target"),
        ("recover", handle_recover, "Y, θ → X: точное восстановление"),
    ):
        action = actions.add_parser(name, help=help_text, parents=parents)
        action.add_argument("--model", required=True, help="JSON условной модели")
        action.add_argument("--target", required=True, help="JSON целевого закона")
        action.add_argument("--input", default=STDIN, help="CSV со значениями (по умолчанию stdin)")
        action.set_defaults(handler=handler)
