from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from typing import Any, Callable, NoReturn

import pandas as pd

import config
from config import RunConfig
from services.errors import InfeasibleError, InnokitError, ValidationError, WorkLimitExceeded
from utils.io_helpers import dump_csv, dump_json
from utils.logging_config import set_level

## ────────────── Логгер и коды выхода ──────────────
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2


class UsageError(Exception):
    """Неверная командная строка (argparse)."""

    def __init__(self, message: str, usage: str) -> None:
        super().__init__(message)
        self.usage = usage


class InnokitArgumentParser(argparse.ArgumentParser):
    """argparse, который не завершает процесс с кодом 2 на ошибке разбора."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(message, self.format_usage())


## ────────────── Результат команды ──────────────
@dataclass
class CommandResult:
    payload: dict[str, Any]
    frame: pd.DataFrame | None = None
    seed: int | None = None
    default_format: str | None = None

    def render(self, output_format: str) -> str:
        if output_format == "csv":
            frame = self.frame if self.frame is not None else _flat_frame(self.payload)
            return dump_csv(frame, self.seed)
        payload = dict(self.payload)
        if self.seed is not None:
            payload["seed"] = self.seed
        return dump_json(payload)


def _flat_frame(payload: dict[str, Any]) -> pd.DataFrame:
    row = {k: v for k, v in payload.items() if isinstance(v, (int, float, str, bool)) or v is None}
    return pd.DataFrame([row])


Handler = Callable[[argparse.Namespace, RunConfig], CommandResult]


## ────────────── Общие флаги ──────────────
def common_options() -> argparse.ArgumentParser:
    """Флаги запуска; допустимы и до, и после имени подкоманды."""
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("параметры запуска")
    group.add_argument("--config", default=argparse.SUPPRESS, help="JSON-файл с полями RunConfig")
    group.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="Зерно генератора (0 ≤ seed < 2^64)")
    group.add_argument("--tolerance", type=float, default=argparse.SUPPRESS, help="Допуск сравнения вероятностей")
    group.add_argument(
        "--work-limit", dest="work_limit", type=float, default=argparse.SUPPRESS,
        help="Предел перебора (опор/систем)",
    )
    group.add_argument(
        "--format", dest="output_format", choices=config.OUTPUT_FORMATS, default=argparse.SUPPRESS,
        help="Формат вывода",
    )
    group.add_argument(
        "--log-level", dest="log_level", default=argparse.SUPPRESS,
        help="Уровень логирования (DEBUG, INFO, WARNING, ...)",
    )
    return parent


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """Флаг CLI > cfg.json > переменные окружения > значения по умолчанию."""
    work_limit = getattr(args, "work_limit", None)
    try:
        return RunConfig.from_env().merged(
            getattr(args, "config", None),
            seed=getattr(args, "seed", None),
            tolerance=getattr(args, "tolerance", None),
            work_limit=int(work_limit) if work_limit is not None else None,
            output_format=getattr(args, "output_format", None),
        )
    except ValidationError:
        raise
    except FileNotFoundError:
        raise ValidationError(f"file not found: {args.config}") from None
    except ValueError as e:
        raise ValidationError(str(e)) from None


## ────────────── Запуск обработчика ──────────────
def execute(args: argparse.Namespace) -> int:
    """Выполняет подкоманду и переводит исключения в коды выхода."""
    try:
        if getattr(args, "log_level", None):
            set_level(args.log_level)
        run_config = resolve_run_config(args)
        result: CommandResult = args.handler(args, run_config)
        explicit = getattr(args, "output_format", None)
        output_format = explicit or result.default_format or run_config.output_format
        sys.stdout.write(result.render(output_format))
        sys.stdout.flush()
        return EXIT_OK
    except (InfeasibleError, WorkLimitExceeded) as e:
        print(f"innokit: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValidationError, InnokitError) as e:
        print(f"innokit: {e}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as e:
        print(f"innokit: {e}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:
        logger.exception("❌ Непредвиденная ошибка")
        return EXIT_INVALID
