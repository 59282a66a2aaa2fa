from __future__ import annotations

import argparse
import logging

import config
from config import RunConfig
from handlers.common import CommandResult
from handlers.mec import coupling_frame
from services.ikea import best_partition, min_shelves
from services.mec import MarginalSet
from utils.io_helpers import load_json

## ────────────── Подкоманда ikea ──────────────
logger = logging.getLogger(__name__)


def handle_ikea(args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
    customers = MarginalSet.from_json(load_json(args.customers))
    payload: dict[str, object] = {}
    shelves = args.shelves
    if shelves is None:
        epsilon = args.epsilon if args.epsilon is not None else config.IKEA_EPSILON
        shelves = min_shelves(
            customers, args.columns, epsilon,
            work_limit=run_config.work_limit, tolerance=run_config.tolerance,
        )
        payload["epsilon"] = epsilon
    plan = best_partition(
        customers, args.columns, shelves,
        work_limit=run_config.work_limit, tolerance=run_config.tolerance,
    )
    frame = coupling_frame(plan.coupling)
    frame.insert(2, "column", plan.assignment)
    return CommandResult(payload={**plan.to_json(), **payload}, frame=frame)


def register(subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("ikea", help="Раскладка по колонкам и минимальное число полок", parents=parents)
    parser.add_argument("--customers", required=True, help="JSON-список Pmf покупателей")
    parser.add_argument("--columns", type=int, required=True, help="Число колонок L")
    size = parser.add_mutually_exclusive_group()
    size.add_argument("--shelves", type=int, help="Число полок N")
    size.add_argument("--epsilon", type=float, help="Допустимый остаток при поиске минимального N")
    parser.set_defaults(handler=handle_ikea)
