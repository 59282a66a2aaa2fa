"""Подкоманды CLI innokit: сборка парсера и dispatch."""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

from handlers import causal, continuous, ikea, lossy, mec
from handlers.common import EXIT_INVALID, InnokitArgumentParser, UsageError, common_options, execute

SUBCOMMANDS = (continuous, lossy, mec, causal, ikea)


def build_parser() -> InnokitArgumentParser:
    parents = [common_options()]
    parser = InnokitArgumentParser(
        prog="innokit",
        description="Инновационные представления случайных процессов и связки минимальной энтропии",
        parents=parents,
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for module in SUBCOMMANDS:
        module.register(subparsers, parents)
    return parser


def dispatch(argv: Sequence[str] | None = None) -> int:
    """
    Разбирает argv и выполняет подкоманду.

    Returns:
        0 — успех, 1 — ошибка ввода или командной строки, 2 — нет решения / предел перебора
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except UsageError as e:
        sys.stderr.write(e.usage)
        print(f"innokit: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as e:
        # --help
        return int(e.code or 0)
    return execute(args)
