from __future__ import annotations

import argparse
import logging

import pandas as pd

from config import RunConfig
from handlers.common import CommandResult
from services.distributions import entropy
from services.mec import (
    Coupling,
    MarginalSet,
    beta_bounds,
    exhaustive_mec,
    greedy_mec,
    max_vertex_support,
    min_entropy_box,
)
from utils.io_helpers import load_json

## ────────────── Подкоманды mec ──────────────
logger = logging.getLogger(__name__)


def coupling_frame(coupling: Coupling) -> pd.DataFrame:
    frame = pd.DataFrame({"symbol": range(coupling.B), "mass": coupling.output.masses})
    for i, mapping in enumerate(coupling.recovery_maps):
        frame[f"source_{i}"] = mapping
    return frame


def _marginals(args: argparse.Namespace) -> MarginalSet:
    return MarginalSet.from_json(load_json(args.marginals))


def handle_greedy(args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
    coupling = greedy_mec(_marginals(args), run_config.tolerance)
    return CommandResult(payload=coupling.to_json(), frame=coupling_frame(coupling))


def handle_exact(args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
    marginals = _marginals(args)
    B = args.B if args.B is not None else max_vertex_support(marginals)
    coupling = exhaustive_mec(marginals, B, run_config.work_limit, run_config.tolerance)
    return CommandResult(payload=coupling.to_json(), frame=coupling_frame(coupling))


def handle_bound(args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
    marginals = _marginals(args)
    B = args.B if args.B is not None else max_vertex_support(marginals)
    bounds = beta_bounds(marginals, B, run_config.work_limit, run_config.tolerance)
    beta = min_entropy_box(bounds, run_config.tolerance)
    frame = pd.DataFrame({"lower": bounds.lower, "upper": bounds.upper, "beta": beta.masses})
    return CommandResult(
        payload={"bound": entropy(beta), "B": B, "box": bounds.to_json(), "beta": list(beta.masses)},
        frame=frame,
    )


def register(subparsers: argparse._SubParsersAction, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("mec", help="Связка минимальной энтропии", parents=parents)
    actions = parser.add_subparsers(dest="action", required=True)
    for name, handler, help_text in (
        ("greedy", handle_greedy, "Жадная связка"),
        ("exact", handle_exact, "Точный оптимум перебором вершин"),
        ("bound", handle_bound, "Нижняя оценка через покоординатные границы"),
    ):
        action = actions.add_parser(name, help=help_text, parents=parents)
        action.add_argument("--marginals", required=True, help="JSON-список Pmf")
        action.add_argument("--B", dest="B", type=int, default=None, help="Число выходных символов")
        action.set_defaults(handler=handler)
