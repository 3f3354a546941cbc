"""Unit-suffixed quantity parsing.

All internal computation is strict SI. CLI flags and config files may carry
human-friendly suffixes ("35um", "0.232mm", "1cm2"); these helpers convert
them at the boundary. A bare number is taken as already-SI.
"""

from __future__ import annotations

import re

_LENGTH_FACTORS = {
    "m": 1.0,
    "mm": 1e-3,
    "um": 1e-6,
    "cm": 1e-2,
}

_AREA_FACTORS = {
    "m2": 1.0,
    "cm2": 1e-4,
    "mm2": 1e-6,
}

_QUANTITY_RE = re.compile(r"^\s*([+-]?\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)\s*([a-zA-Z0-9]*)\s*$")


class UnitError(ValueError):
    """Raised when a quantity string cannot be parsed."""


def _parse(text: str, factors: dict[str, float], kind: str) -> float:
    m = _QUANTITY_RE.match(text)
    if not m:
        raise UnitError(f"cannot parse {kind} quantity: {text!r}")
    value, suffix = float(m.group(1)), m.group(2)
    if suffix == "":
        return value
    try:
        return value * factors[suffix]
    except KeyError:
        raise UnitError(
            f"unknown {kind} unit {suffix!r} (expected one of {sorted(factors)})"
        ) from None


def parse_length(text: str) -> float:
    """Parse a length like "35um" or "0.232mm" into metres."""
    return _parse(text, _LENGTH_FACTORS, "length")


def parse_area(text: str) -> float:
    """Parse an area like "1cm2" or "0.09m2" into square metres."""
    return _parse(text, _AREA_FACTORS, "area")
