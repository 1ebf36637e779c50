"""Floating-point helpers shared by the profile and invariant engines"""

import math
from fractions import Fraction
from typing import Union

Real = Union[float, Fraction, int]

SLACK_TOLERANCE = 1e-9
EXACT_TOLERANCE = 1e-12


def one_minus_pow(x: Real, exponent: float) -> float:
    """1 - (1 - x)**exponent for x in [0, 1], accurate for tiny x"""
    x = float(x)
    if x >= 1.0:
        return 1.0
    if x <= 0.0:
        return 0.0
    return -math.expm1(exponent * math.log1p(-x))


def hammer_factor(tau: Real, n: int) -> float:
    """(1/tau) * (1 - (1 - tau)**((n+1)/n)); tends to (n+1)/n as tau -> 0"""
    tau = float(tau)
    if tau <= 0.0:
        return (n + 1) / n
    return one_minus_pow(tau, (n + 1) / n) / tau


def format_number(value: Real) -> str:
    """Decimal string with 15 significant digits"""
    return format(float(value), ".15g")
