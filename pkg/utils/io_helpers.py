"""
Чтение и запись файлов CLI: JSON-модели, CSV с данными и детерминированный вывод.
"""
from __future__ import annotations

import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, TextIO

import pandas as pd

from services.errors import ValidationError

logger = logging.getLogger(__name__)

STDIN = "-"
# enough digits for floats to survive a write/read cycle unchanged
FLOAT_FORMAT = "%.17g"


def load_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ValidationError(f"file not found: {path}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None


def read_table(path: str | Path = STDIN) -> pd.DataFrame:
    """CSV с заголовком; строки, начинающиеся с '#', пропускаются. '-' — стандартный ввод."""
    source: str | Path | TextIO
    if str(path) == STDIN:
        source = io.StringIO(sys.stdin.read())
    else:
        source = Path(path)
        if not source.exists():
            raise ValidationError(f"file not found: {path}")
    try:
        frame = pd.read_csv(source, comment="#", float_precision="round_trip")
    except pd.errors.EmptyDataError:
        raise ValidationError(f"{path}: no data") from None
    except pd.errors.ParserError as e:
        raise ValidationError(f"{path}: malformed CSV ({e})") from None
    logger.debug("прочитано %d строк из %s", len(frame), path)
    return frame


def numeric_column(frame: pd.DataFrame, name: str, *, required: bool = True) -> pd.Series | None:
    """Колонка name, а если её нет — первая колонка (только для обязательных)."""
    if name in frame.columns:
        column = frame[name]
    elif required and len(frame.columns):
        column = frame.iloc[:, 0]
    elif required:
        raise ValidationError(f"column {name!r} is missing")
    else:
        return None
    values = pd.to_numeric(column, errors="coerce")
    if values.isna().any():
        raise ValidationError(f"column {name!r} has non-numeric values")
    return values


def dump_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def dump_csv(frame: pd.DataFrame, seed: int | None = None) -> str:
    buffer = io.StringIO()
    if seed is not None:
        buffer.write(f"# seed: {seed}\n")
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()
