"""Uniform symmetric quantization to 4- or 8-bit two's-complement integers."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .codes import BitWord

__all__ = [
    "QuantConfig",
    "flip_count",
    "quantize",
    "signed_value",
    "twos_complement_bits",
    "value_range",
]

_WIDTHS = (4, 8)


def value_range(b: int) -> tuple[int, int]:
    """Inclusive signed range of a b-bit two's-complement integer."""
    if b not in _WIDTHS:
        raise ValueError(f"bit width must be one of {_WIDTHS}, got {b}")
    half = 1 << (b - 1)
    return -half, half - 1


@dataclass(frozen=True)
class QuantConfig:
    bits: int
    delta: float  # step size, > 0

    def __post_init__(self) -> None:
        value_range(self.bits)
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be a positive finite number, got {self.delta}")


def quantize(omega: float, cfg: QuantConfig) -> int:
    """Nearest representable integer to omega/delta.

    Halfway cases round to even, then the result is clamped to the signed
    b-bit range.
    """
    if not math.isfinite(omega):
        raise ValueError(f"weight must be finite, got {omega}")
    lo, hi = value_range(cfg.bits)
    v = round(omega / cfg.delta)
    return min(max(v, lo), hi)


def twos_complement_bits(v: int, b: int) -> BitWord:
    """The b-bit two's-complement pattern of v, coordinate 1 = sign bit."""
    lo, hi = value_range(b)
    if not lo <= v <= hi:
        raise ValueError(f"value {v} out of range [{lo}, {hi}]")
    return BitWord(v & ((1 << b) - 1), b)


def signed_value(pattern: int, b: int) -> int:
    """Inverse of twos_complement_bits on raw pattern ints."""
    if not 0 <= pattern < (1 << b):
        raise ValueError(f"pattern {pattern:#x} does not fit in {b} bits")
    half = 1 << (b - 1)
    return pattern - (1 << b) if pattern >= half else pattern


def flip_count(u: int, v: int, b: int) -> int:
    """Bit flips needed to turn the pattern of u into the pattern of v."""
    return (twos_complement_bits(u, b).bits ^ twos_complement_bits(v, b).bits).bit_count()
