from __future__ import annotations

import argparse
import logging

from config import RunConfig
from handlers.common import CommandResult
from services.causal import METHODS, STATISTICS, estimate_joint, infer_direction
from services.errors import ValidationError
from utils.io_helpers import read_table

## ────────────── Подкоманда causal ──────────────
logger = logging.getLogger(__name__)


def handle_causal(args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
    frame = read_table(args.input)
    if frame.shape[1] != 2:
        raise ValidationError(f"{args.input}: expected two columns, got {frame.shape[1]}")
    missing = int(frame.isna().any(axis=1).sum())
    if missing:
        raise ValidationError(f"{args.input}: {missing} rows have missing values")
    table = estimate_joint(frame.astype(str))
    verdict = infer_direction(
        table,
        method=args.method,
        statistic=args.statistic,
        smoothing=args.smoothing == "add-one",
        work_limit=run_config.work_limit,
        tolerance=run_config.tolerance,
    )
    payload = verdict.to_json()
    payload["columns"] = [str(c) for c in frame.columns]
    payload["samples"] = int(len(frame))
    return CommandResult(payload=payload)


def register(subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("causal", help="Направление причинности по парам значений", parents=parents)
    parser.add_argument("--input", required=True, help="CSV из двух колонок с заголовком")
    parser.add_argument("--method", choices=METHODS, default="greedy", help="Метод связки")
    parser.add_argument("--statistic", choices=STATISTICS, default="entropy_of_e", help="Статистика решения")
    parser.add_argument("--smoothing", choices=("none", "add-one"), default="none", help="Сглаживание частот")
    parser.set_defaults(handler=handle_causal)
