"""JSON and CSV rendering of command results."""

import csv
import enum
import io
import json
import logging
import math
import sys
from collections.abc import Mapping
from fractions import Fraction
from pathlib import Path

from .config import SCHEMA_VERSION

log = logging.getLogger(__name__)

__all__ = [
    "SIGNIFICANT_DIGITS",
    "format_float",
    "to_jsonable",
    "envelope",
    "render_json",
    "render_csv",
    "write_output",
]

SIGNIFICANT_DIGITS = 12


def format_float(value: float) -> float:
    if not math.isfinite(value):
        return value
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


def to_jsonable(value):
    """Exact rationals as "num/den", floats at 12 significant digits."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "to_json"):
        return to_jsonable(value.to_json())
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    # numpy scalars
    if hasattr(value, "item"):
        return to_jsonable(value.item())
    raise TypeError(f"cannot serialize {type(value).__name__}")


def envelope(command: str, config, result, checks: Mapping[str, bool]) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "result": result,
        "checks": dict(checks),
        "passed": all(checks.values()),
    }


def render_json(report: dict) -> str:
    return json.dumps(to_jsonable(report), indent=2) + "\n"


def render_csv(rows: list[Mapping], columns: list[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([to_jsonable(row[column]) for column in columns])
    return buffer.getvalue()


def write_output(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    log.info("→ Written to %s", path)
