"""Configuration constants, YAML defaults and run configuration."""

import argparse
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import yaml

from .errors import InputError
from .tree import MAX_HEIGHT, GateKind

log = logging.getLogger(__name__)

__all__ = [
    "COMMANDS",
    "CONFIG_DIR",
    "DEFAULT_CONFIG",
    "DEFAULTS",
    "SCHEMA_VERSION",
    "RunConfig",
    "load_config",
    "parse_probability",
    "build_run_config",
]

SCHEMA_VERSION = "andor-equilibrium/1"

COMMANDS = (
    "poly",
    "lemma1",
    "lemma2",
    "duality",
    "identities",
    "alpha",
    "cep1",
    "eigen",
    "prop",
    "isets",
    "compare",
    "maxiid",
)

CONFIG_DIR = Path.home() / ".config" / "andor-equilibrium"
DEFAULT_CONFIG = CONFIG_DIR / "config.yaml"

DEFAULTS: dict = {
    "tol": 1e-6,
    "constraint_tol": 1e-10,
    "inverse_tol": 1e-12,
    "grid": 4,
    "seed": 0,
    "starts": 8,
    "emit": "json",
}


def load_config(path: Path, explicit: bool = False) -> dict:
    """Read YAML defaults; a missing default file is simply empty."""
    if not path.exists():
        if explicit:
            log.error("Error: Config file not found: %s", path)
            sys.exit(2)
        return {}
    with path.open() as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        log.error("Error: %s must hold a mapping of settings", path)
        sys.exit(2)
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        log.warning("Ignoring unknown config keys: %s", sorted(unknown))
    return {key: data[key] for key in DEFAULTS if key in data}


def parse_probability(text) -> Fraction:
    """Exact probability from "0.75", "3/4" or a number."""
    try:
        value = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"not a probability: {text!r}") from e
    if not 0 <= value <= 1:
        raise InputError(f"probability must lie in [0, 1], got {text}")
    return value


@dataclass(frozen=True)
class RunConfig:
    command: str
    gate: GateKind
    height: int
    r: Fraction | None
    grid: int
    tol: float
    output_format: str
    output_path: Path | None
    seed: int
    starts: int
    constraint_tol: float
    inverse_tol: float
    i: int | None = None

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "gate": self.gate.value,
            "height": self.height,
            "r": self.r,
            "i": self.i,
            "grid": self.grid,
            "tol": self.tol,
            "constraint_tol": self.constraint_tol,
            "inverse_tol": self.inverse_tol,
            "seed": self.seed,
            "starts": self.starts,
            "emit": self.output_format,
        }


def _pick(args: argparse.Namespace, file_config: dict, key: str):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return file_config.get(key, DEFAULTS.get(key))


def build_run_config(
    args: argparse.Namespace, file_config: dict
) -> RunConfig:
    """Merge flags over file values over defaults, then validate."""
    command = args.command
    if command not in COMMANDS:
        raise InputError(f"unknown command {command!r}")

    height = int(getattr(args, "height", None) or 1)
    if not 1 <= height <= MAX_HEIGHT:
        raise InputError(
            f"height must be between 1 and {MAX_HEIGHT}, got {height}"
        )
    tol = float(_pick(args, file_config, "tol"))
    constraint_tol = float(_pick(args, file_config, "constraint_tol"))
    inverse_tol = float(_pick(args, file_config, "inverse_tol"))
    if min(tol, constraint_tol, inverse_tol) <= 0:
        raise InputError("tolerances must be positive")
    grid = int(_pick(args, file_config, "grid"))
    if grid < 2:
        raise InputError(f"grid must be at least 2, got {grid}")
    starts = int(_pick(args, file_config, "starts"))
    if starts < 1:
        raise InputError(f"starts must be positive, got {starts}")
    emit = str(_pick(args, file_config, "emit"))
    if emit not in ("json", "csv"):
        raise InputError(f"emit must be json or csv, got {emit!r}")

    raw_r = getattr(args, "r", None)
    out = getattr(args, "out", None)
    return RunConfig(
        command=command,
        gate=GateKind(getattr(args, "gate", None) or "and"),
        height=height,
        r=parse_probability(raw_r) if raw_r is not None else None,
        grid=grid,
        tol=tol,
        output_format=emit,
        output_path=Path(out) if out else None,
        seed=int(_pick(args, file_config, "seed")),
        starts=starts,
        constraint_tol=constraint_tol,
        inverse_tol=inverse_tol,
        i=getattr(args, "i", None),
    )
