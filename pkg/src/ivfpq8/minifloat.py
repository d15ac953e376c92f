"""Unsigned 8-bit minifloat codecs for nonnegative float storage.

Two shipped formats, ``e5m3`` and ``e4m4``, hold nonnegative finite
values only: no sign bit, no subnormals, no Inf/NaN.  An all-ones
exponent field is an ordinary finite value, which maximizes range.
Conversion from binary32 is a pure bit operation, an exponent rebase
plus a mantissa right-shift, so encode truncates toward zero; decode
is always exact in binary32.

A clamping binary16 path is included for the 2-byte comparison arm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MiniFloatSpec",
    "E5M3",
    "E4M4",
    "encode",
    "decode",
    "encode_array",
    "decode_array",
    "decode_table",
    "encode_f16",
    "decode_f16",
    "encode_f16_array",
    "decode_f16_array",
]

_F32_MANT_BITS = 23
_F32_BIAS = 127
_F16_MAX = np.float32(65504.0)


@dataclass(frozen=True)
class MiniFloatSpec:
    """Bit layout of an unsigned 8-bit float: exponent high, mantissa low.

    exponent_bits + mantissa_bits must equal 8 (there is no sign bit).
    """

    exponent_bits: int
    mantissa_bits: int
    bias: int

    def __post_init__(self):
        if self.exponent_bits + self.mantissa_bits != 8:
            raise ValueError("exponent_bits + mantissa_bits must be 8")
        if self.exponent_bits < 1 or self.mantissa_bits < 1:
            raise ValueError("exponent and mantissa fields must be nonempty")

    @property
    def max_exponent_field(self) -> int:
        return (1 << self.exponent_bits) - 1

    @property
    def min_normal(self) -> float:
        """Smallest nonzero value, 2^(1 - bias); inputs below it flush to zero."""
        return 2.0 ** (1 - self.bias)

    @property
    def max_value(self) -> float:
        """Largest value, (2 - 2^-m) * 2^(max_exponent_field - bias)."""
        frac = 2.0 - 2.0 ** (-self.mantissa_bits)
        return frac * 2.0 ** (self.max_exponent_field - self.bias)

    @property
    def relative_step(self) -> float:
        """Mantissa quantum 2^-m; truncation loses less than one step."""
        return 2.0 ** (-self.mantissa_bits)

    def constants(self) -> dict[str, float]:
        return {
            "min_normal": self.min_normal,
            "max_value": self.max_value,
            "relative_step": self.relative_step,
        }


# e5m3 bias 15 makes its normalized range a superset of binary16's
# (min_normal 2^-14, max 122880 > 65504); e4m4 bias 7 centers its
# 15-binade range on [2^-6, 496].
E5M3 = MiniFloatSpec(exponent_bits=5, mantissa_bits=3, bias=15)
E4M4 = MiniFloatSpec(exponent_bits=4, mantissa_bits=4, bias=7)


def encode_array(x: np.ndarray, spec: MiniFloatSpec) -> np.ndarray:
    """Encode nonnegative finite float32 values to one byte each.

    Values below min_normal flush to 0x00; values at or above the
    format's upper binade boundary clamp to 0xFF.  In between, the
    binary32 exponent is rebased by (bias - 127) and the mantissa is
    truncated to the top mantissa_bits bits (round toward zero).

    Callers guarantee nonnegative finite input (squared norms always
    are); the contract is assert-checked and stripped under ``-O``.
    """
    x = np.ascontiguousarray(x, dtype=np.float32)
    assert np.all(np.isfinite(x)), "encode requires finite input"
    assert np.all(x >= 0.0), "encode requires nonnegative input"

    bits = x.view(np.uint32)
    exp32 = (bits >> _F32_MANT_BITS).astype(np.int32)
    mant32 = bits & np.uint32((1 << _F32_MANT_BITS) - 1)

    rebased = exp32 - _F32_BIAS + spec.bias
    shift = _F32_MANT_BITS - spec.mantissa_bits
    code = (rebased.astype(np.uint32) << spec.mantissa_bits) | (mant32 >> shift)

    out = np.where(rebased < 1, np.uint32(0x00), code)
    out = np.where(rebased > spec.max_exponent_field, np.uint32(0xFF), out)
    return out.astype(np.uint8)


def decode_array(codes: np.ndarray, spec: MiniFloatSpec) -> np.ndarray:
    """Decode bytes back to float32; exact for every code.

    Any code with a zero exponent field maps to 0.0 (the format has no
    subnormals, and the encoder never emits such codes except 0x00).
    """
    codes = np.asarray(codes, dtype=np.uint8)
    exp = (codes >> spec.mantissa_bits).astype(np.uint32)
    mant = (codes & np.uint8((1 << spec.mantissa_bits) - 1)).astype(np.uint32)

    shift = _F32_MANT_BITS - spec.mantissa_bits
    exp32 = exp + np.uint32(_F32_BIAS - spec.bias)
    bits = (exp32 << _F32_MANT_BITS) | (mant << shift)
    values = bits.astype(np.uint32).view(np.float32)
    return np.where(exp == 0, np.float32(0.0), values)


def encode(x: float, spec: MiniFloatSpec) -> int:
    """Encode a single nonnegative finite float; see encode_array."""
    return int(encode_array(np.float32(x).reshape(1), spec)[0])


def decode(code: int, spec: MiniFloatSpec) -> float:
    """Decode a single byte value; see decode_array."""
    return float(decode_array(np.uint8(code).reshape(1), spec)[0])


def decode_table(spec: MiniFloatSpec) -> np.ndarray:
    """All 256 decoded values, indexed by code byte."""
    return decode_array(np.arange(256, dtype=np.uint8), spec)


def encode_f16_array(x: np.ndarray) -> np.ndarray:
    """Round nonnegative float32 values to binary16 bit patterns (uint16).

    Round-to-nearest-even, except overflow clamps to the max finite
    binary16 value (0x7BFF) instead of producing Inf, mirroring the
    8-bit formats' storage-only use.
    """
    x = np.asarray(x, dtype=np.float32)
    assert np.all(np.isfinite(x)), "encode_f16 requires finite input"
    assert np.all(x >= 0.0), "encode_f16 requires nonnegative input"
    # Pre-clamping preserves RNE for in-range values: everything in
    # (65504, 65520) rounds down to 65504 anyway.
    clamped = np.minimum(x, _F16_MAX)
    return clamped.astype(np.float16).view(np.uint16)


def decode_f16_array(bits: np.ndarray) -> np.ndarray:
    """Binary16 bit patterns (uint16) to float32; exact."""
    return np.asarray(bits, dtype=np.uint16).view(np.float16).astype(np.float32)


def encode_f16(x: float) -> int:
    return int(encode_f16_array(np.float32(x).reshape(1))[0])


def decode_f16(bits: int) -> float:
    return float(decode_f16_array(np.uint16(bits).reshape(1))[0])
