"""Argument checks shared by the CLI and the estimators."""

from __future__ import annotations

from pathlib import Path

from .corpus import YEAR_MAX, YEAR_MIN
from .exceptions import ConfigError


def check_fraction(value, name: str, *, closed_top: bool = False) -> float:
    """A real in [0, 1) (or [0, 1] when ``closed_top``)."""
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if v < 0 or v > 1 or (v == 1 and not closed_top):
        raise ConfigError(f"{name} must lie in [0, {'1]' if closed_top else '1)'}, got {v}")
    return v


def check_nonneg_int(value, name: str) -> int:
    try:
        v = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {value!r}") from None
    if v < 0 or v != float(value):
        raise ConfigError(f"{name} must be a non-negative integer, got {value!r}")
    return v


def check_years(years, name: str = "snapshot years") -> list[int]:
    """Strictly ascending years inside the supported range."""
    out = []
    for y in years:
        try:
            out.append(int(y))
        except (TypeError, ValueError):
            raise ConfigError(f"{name}: {y!r} is not a year") from None
    for y in out:
        if not YEAR_MIN <= y <= YEAR_MAX:
            raise ConfigError(f"{name}: {y} outside [{YEAR_MIN}, {YEAR_MAX}]")
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ConfigError(f"{name} must be strictly ascending, got {out}")
    return out


def check_file(path, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{what} not found: {p}")
    return p


def check_dir(path, what: str) -> Path:
    p = Path(path)
    if not p.is_dir():
        raise ConfigError(f"{what} not found: {p}")
    return p


def parse_list(text: str, name: str, conv=float) -> list:
    """Comma-separated values, e.g. ``"0.01,0.05"``."""
    try:
        return [conv(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {text!r}") from None
