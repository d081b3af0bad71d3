"""Reversible-circuit synthesis for modular multiplication and
exponentiation, with exhaustive classical verification."""

from .circuit import Circuit, Gate, GateCounts, compose, counts, inverse, simulate
from .numeric import csd, egcd, modinv, multiplicative_order, semiprimes

__all__ = [
    "Circuit",
    "Gate",
    "GateCounts",
    "compose",
    "counts",
    "inverse",
    "simulate",
    "csd",
    "egcd",
    "modinv",
    "multiplicative_order",
    "semiprimes",
]
