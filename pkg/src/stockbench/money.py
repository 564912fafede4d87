"""Fixed-point money arithmetic.

Every monetary value inside the engine is an int64 count of micro-currency
units (1 unit = 1e-6 of the currency). Quantities stay plain integers, so
profit components are exact and the matrix and scalar simulation paths can
agree bit for bit. Floats never enter the accounting path; Decimal/Fraction
conversions live only at the API edges.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction

import numpy as np

MONEY_SCALE = 10**6
_SCALE_DEC = Decimal(MONEY_SCALE)


def to_micros(value) -> int:
    """Convert a currency amount (int, str, Decimal, or float) to micro-units.

    Values finer than the 1e-6 grid are rejected rather than rounded.
    """
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return int(value) * MONEY_SCALE
    if isinstance(value, float):
        value = Decimal(repr(value))
    elif isinstance(value, str):
        value = Decimal(value)
    if not isinstance(value, Decimal):
        raise TypeError(f"unsupported money type: {type(value).__name__}")
    scaled = value * _SCALE_DEC
    if scaled != scaled.to_integral_value():
        raise ValueError(f"{value} is finer than the 1e-6 money grid")
    return int(scaled)


def micros_to_decimal(micros) -> Decimal:
    return Decimal(int(micros)) / _SCALE_DEC


def micros_to_fraction(micros) -> Fraction:
    return Fraction(int(micros), MONEY_SCALE)


def format_micros(micros) -> str:
    """Fixed 6-decimal string; exact and byte-stable for CSV output."""
    return f"{Decimal(int(micros)).scaleb(-6):.6f}"


def parse_money(text: str) -> int:
    return to_micros(Decimal(text))


def scale_micros(micros_grid: np.ndarray, factor: Fraction) -> np.ndarray:
    """Scale a micro-unit grid by an exact rational factor, rounding half up
    to the money grid. Exact whenever the product lands on the grid (the
    built-in cost rules always do for cent-valued prices)."""
    num = micros_grid.astype(object) * factor.numerator
    den = factor.denominator
    out = (num + den // 2) // den
    return np.asarray(out.astype(np.int64))
