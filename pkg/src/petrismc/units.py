"""Model time units: one unit is 30 seconds.

Calendar conventions: a month is 30 days, a year is 12 months (360 days).
"""

import re

SECONDS_PER_UNIT = 30.0
MINUTE = 60.0 / SECONDS_PER_UNIT
HOUR = 60 * MINUTE
DAY = 24 * HOUR
MONTH = 30 * DAY
YEAR = 12 * MONTH

UNIT_SUFFIXES = {"s": 1.0 / SECONDS_PER_UNIT, "m": MINUTE, "h": HOUR, "d": DAY}

_TIME = re.compile(r"^\s*([0-9]+(?:\.[0-9]*)?(?:[eE][+-]?[0-9]+)?)\s*([smhd]?)\s*$")


def to_time_units(value, suffix: str = ""):
    """``value`` expressed in ``suffix`` units, converted to model time units.

    Integral results are returned as ``int``.
    """
    if not suffix:
        return value
    out = value * UNIT_SUFFIXES[suffix]
    return int(out) if float(out).is_integer() else out


def parse_time(text: str) -> float:
    """Parse ``'86400'``, ``'30d'``, ``'12h'``, ``'1m'`` (minutes) or ``'45s'``."""
    m = _TIME.match(str(text))
    if not m:
        raise ValueError(f"invalid time value {text!r}")
    return float(to_time_units(float(m.group(1)), m.group(2)))
