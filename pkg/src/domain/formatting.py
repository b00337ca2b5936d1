from __future__ import annotations

import math
import re
from fractions import Fraction

REPORT_DIGITS = 15


def format_fraction(value: Fraction | int) -> str:
    fraction = Fraction(value)
    return f"{fraction.numerator}/{fraction.denominator}"


def round_sig(value: float, digits: int = REPORT_DIGITS) -> float:
    if value == 0.0 or not math.isfinite(value):
        return float(value)
    exponent = math.floor(math.log10(abs(value)))
    return round(float(value), digits - 1 - exponent)


def relative_deviation(value: float, reference: float) -> float:
    if reference == 0.0:
        return math.inf if value != 0.0 else 0.0
    return (value - reference) / abs(reference)


def parse_int_list(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(token) for token in re.split(r"[,\s]+", text.strip()) if token]
