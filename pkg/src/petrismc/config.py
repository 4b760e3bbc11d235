"""Flat ``key = value`` configuration files.

Values are read as booleans (``true``/``false``), integers, reals, or
otherwise strings (optionally quoted). Time parameters may carry a unit
suffix (``30d``); see :func:`petrismc.units.parse_time`. ``#`` and ``;``
start comments.
"""

from __future__ import annotations

import configparser
from pathlib import Path

from .errors import ConfigError
from .units import UNIT_SUFFIXES, parse_time

__all__ = ["ConfigError", "load_config", "parse_config", "parse_value"]


def parse_value(text: str):
    t = text.strip()
    low = t.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if len(t) >= 2 and t[0] == t[-1] and t[0] in "\"'":
        return t[1:-1]
    for conv in (int, float):
        try:
            return conv(t)
        except ValueError:
            pass
    if t and t[-1] in UNIT_SUFFIXES:
        try:
            return parse_time(t)
        except ValueError:
            pass
    return t


def parse_config(text: str, source: str = "<config>") -> dict:
    # configparser handles comments, blank lines and continuation; a
    # synthetic section header makes the flat format acceptable to it
    cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=("#",), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string("[config]\n" + text, source=source)
    except configparser.Error as e:
        raise ConfigError(f"{source}: {e.message.splitlines()[0]}") from e
    return {k: parse_value(v) for k, v in cp["config"].items()}


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {str(path)!r}: {e.strerror}") from e
    return parse_config(text, str(path))
