"""Parsing of numeric command-line values."""
import math
import re
from typing import List

from app.core.exceptions import ConfigurationError

_GRID = re.compile(r"^\s*([^:]+):([^:]+):([^:]+)\s*$")


def parse_strict_float(value: str) -> float:
    """
    Parse a finite float, rejecting NaN and infinities.

    Args:
        value: String like "0.1" or "1e-6"

    Returns:
        Float value
    """
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"not a number: {value!r}")
    if not math.isfinite(number):
        raise ConfigurationError(f"non-finite value {value!r}")
    return number


def parse_eps_grid(value: str) -> List[float]:
    """
    Parse a scalar, a comma list or an inclusive grid ``start:stop:step``.

    Grid points are start + i*step rounded to 12 decimals so that
    "0.05:0.5:0.05" yields exactly the ten decimal values.

    Args:
        value: String like "0.1", "0.1,0.2" or "0.05:0.5:0.05"

    Returns:
        Ascending list of eps values
    """
    if value is None or not str(value).strip():
        raise ConfigurationError("empty eps specification")
    match = _GRID.match(str(value))
    if match:
        start, stop, step = (parse_strict_float(part) for part in match.groups())
        if step <= 0 or stop < start:
            raise ConfigurationError(f"invalid grid {value!r}: need step > 0 and stop >= start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = [round(start + i * step, 12) for i in range(count)]
    else:
        grid = [parse_strict_float(part) for part in str(value).split(",")]

    if any(eps < 0 for eps in grid):
        raise ConfigurationError(f"eps values must be nonnegative, got {value!r}")
    return sorted(grid)
