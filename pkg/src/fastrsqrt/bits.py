"""IEEE-754 binary32 bit patterns and the magic-constant seed step.

A positive normal float ``x = (1 + m) * 2**e`` has the integer image
``I = N_m * (B + e + m)`` with ``N_m = 2**23`` and ``B = 127``.  The seed of
the fast inverse square root is the float whose bits are ``R - (I >> 1)``.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class DomainError(ValueError):
    """Raised when an input lies outside the positive-normal binary32 domain."""


@dataclass(frozen=True)
class FloatFormat:
    mantissa_bits: int = 23
    exponent_bias: int = 127

    @property
    def N_m(self) -> int:
        return 1 << self.mantissa_bits

    @property
    def B(self) -> int:
        return self.exponent_bias

    @property
    def max_biased_exponent(self) -> int:
        return 2 * self.exponent_bias


FLOAT32 = FloatFormat()
N_M = FLOAT32.N_m
BIAS = FLOAT32.B
MANTISSA_MASK = N_M - 1

# Smallest and largest positive normal binary32 bit patterns.
MIN_NORMAL_BITS = 0x00800000
MAX_NORMAL_BITS = 0x7F7FFFFF

# Biased exponent field shared by every magic constant with e_R = 63.
MAGIC_EXPONENT = 63
MAGIC_BIASED_EXPONENT = MAGIC_EXPONENT + BIAS


class DecodedFloat(NamedTuple):
    exponent: int
    mantissa: float

    @property
    def value(self) -> float:
        return math.ldexp(1.0 + self.mantissa, self.exponent)


def is_positive_normal_bits(bits: int) -> bool:
    return MIN_NORMAL_BITS <= bits <= MAX_NORMAL_BITS


def float_from_bits(bits: int) -> np.float32:
    """Reinterpret a 32-bit pattern as a binary32 value."""
    return np.uint32(bits).view(np.float32)


def encode_bits(x) -> int:
    """Return the raw bit pattern of the positive normal binary32 value ``x``.

    ``x`` must already be exactly representable in binary32; Python floats
    that are not are rejected rather than silently rounded.
    """
    xf = float(x)
    if not math.isfinite(xf) or xf <= 0.0:
        raise DomainError(f"expected a positive finite value, got {x!r}")
    try:
        packed = struct.pack("<f", xf)
    except OverflowError:
        raise DomainError(f"{x!r} overflows binary32") from None
    if struct.unpack("<f", packed)[0] != xf:
        raise DomainError(f"{x!r} is not exactly representable in binary32")
    bits = struct.unpack("<I", packed)[0]
    if not is_positive_normal_bits(bits):
        raise DomainError(f"{x!r} is subnormal in binary32")
    return bits


def decode_bits(bits: int) -> DecodedFloat:
    if not 0 <= bits < (1 << 32):
        raise DomainError(f"{bits!r} is not a 32-bit pattern")
    if bits >> 31:
        raise DomainError(f"0x{bits:08X} has the sign bit set")
    biased = bits >> FLOAT32.mantissa_bits
    if biased == 0 or biased == 255:
        raise DomainError(f"0x{bits:08X} is zero, subnormal, infinite or NaN")
    return DecodedFloat(biased - BIAS, (bits & MANTISSA_MASK) / N_M)


@dataclass(frozen=True)
class MagicConstant:
    """A 32-bit magic constant R together with its slope parameter t."""

    R: int

    def __post_init__(self):
        if not 0 <= self.R < (1 << 32):
            raise DomainError(f"{self.R!r} is not a 32-bit integer")

    @property
    def exponent(self) -> int:
        return (self.R >> FLOAT32.mantissa_bits) - BIAS

    @property
    def m_R(self) -> float:
        return (self.R & MANTISSA_MASK) / N_M

    @property
    def t(self) -> float:
        return magic_to_t(self.R)

    @classmethod
    def from_t(cls, t: float) -> "MagicConstant":
        return cls(t_to_magic(t))

    def __str__(self) -> str:
        return f"0x{self.R:08X}"


def _magic_int(R) -> int:
    return R.R if isinstance(R, MagicConstant) else int(R)


def magic_to_t(R) -> float:
    """Slope parameter ``t = 2 + 4 m_R + 2 / N_m`` of a magic constant."""
    R = _magic_int(R)
    if R >> FLOAT32.mantissa_bits != MAGIC_BIASED_EXPONENT:
        raise DomainError(f"0x{R:08X} does not have exponent field e_R = 63")
    m = (R & MANTISSA_MASK) / N_M
    if m >= 0.5:
        raise DomainError(f"0x{R:08X} has mantissa m_R = {m} >= 1/2")
    return 2.0 + 4.0 * m + 2.0 / N_M


def t_to_magic(t: float) -> int:
    """Nearest magic constant to slope ``t`` (ties round up)."""
    if not 2.0 < t < 4.0:
        raise DomainError(f"t = {t!r} outside (2, 4)")
    # t = 2 + (4 k + 2) / N_m, so k = N_m (t - 2) / 4 - 1/2; rounding that
    # half-up is floor(N_m (t - 2) / 4), and the scaling by 2**21 is exact.
    k = math.floor(N_M * (t - 2.0) / 4.0)
    k = min(k, N_M // 2 - 1)
    return (MAGIC_BIASED_EXPONENT << FLOAT32.mantissa_bits) | k


def seed_bits(R, bits: int) -> int:
    """Integer step ``R - (I_x >> 1)`` on a positive normal bit pattern."""
    R = _magic_int(R)
    if not is_positive_normal_bits(bits):
        raise DomainError(f"0x{bits:08X} is not a positive normal binary32")
    # Sign bit is zero, so the logical shift equals the arithmetic one.
    out = R - (bits >> 1)
    if not is_positive_normal_bits(out):
        raise DomainError(f"seed bits 0x{out & 0xFFFFFFFF:08X} are not a positive normal")
    return out


def seed(R, x) -> np.float32:
    return float_from_bits(seed_bits(R, encode_bits(x)))


# Vectorised helpers -------------------------------------------------------

def floats_to_bits(x: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=np.float32).view(np.uint32)


def bits_to_floats(bits: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(bits, dtype=np.uint32).view(np.float32)


def exponent_block(exponent: int) -> tuple[int, int]:
    """Half-open bit-pattern range holding every float with unbiased ``exponent``."""
    biased = exponent + BIAS
    if not 1 <= biased <= FLOAT32.max_biased_exponent:
        raise DomainError(f"exponent {exponent} outside [-126, 127]")
    start = biased << FLOAT32.mantissa_bits
    return start, start + N_M


def seed_bits_array(R, bits: np.ndarray) -> np.ndarray:
    """Vectorised ``seed_bits`` without range checks (valid for e_R = 63 constants)."""
    bits = np.asarray(bits, dtype=np.uint32)
    return np.uint32(_magic_int(R)) - (bits >> np.uint32(1))
