"""Bit-exact fast inverse square root kernels.

All three published codes share one shape::

    h = half_factor * x
    y = bits(R - (bits(x) >> 1))
    y = y * (c_add - c_mul * h * y * y)      # once per iteration

with every product evaluated left to right.

Two arithmetic models are supported.  ``BINARY32`` rounds after every
operation (SSE code, no FMA); it is the default.  ``X87`` evaluates each
source line in wider precision and rounds only on assignment to a ``float``
variable, which is what 32-bit x87 builds of the same listings do.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .bits import (
    DomainError,
    MagicConstant,
    encode_bits,
    float_from_bits,
    seed_bits,
)

f32 = np.float32


class Arithmetic(str, enum.Enum):
    BINARY32 = "binary32"
    X87 = "x87"


class SchemeId(str, enum.Enum):
    CLASSIC = "classic"
    SCHEME1 = "scheme1"
    SCHEME2 = "scheme2"


@dataclass(frozen=True)
class IterationCoeffs:
    c_add: np.float32
    c_mul: np.float32 = f32(1.0)

    def __post_init__(self):
        object.__setattr__(self, "c_add", f32(self.c_add))
        object.__setattr__(self, "c_mul", f32(self.c_mul))


@dataclass(frozen=True)
class KernelSpec:
    R: MagicConstant
    half_factor: np.float32
    iterations: tuple[IterationCoeffs, ...]
    name: str = "custom"

    def __post_init__(self):
        if not isinstance(self.R, MagicConstant):
            object.__setattr__(self, "R", MagicConstant(int(self.R)))
        object.__setattr__(self, "half_factor", f32(self.half_factor))
        object.__setattr__(self, "iterations", tuple(self.iterations))
        if not 1 <= len(self.iterations) <= 2:
            raise ValueError("a kernel has one or two iterations")

    def coefficient_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-iteration (c_add, c_mul) padded to length two for the backends."""
        its = list(self.iterations) + [IterationCoeffs(1.5)] * (2 - len(self.iterations))
        return (
            np.array([it.c_add for it in its], dtype=np.float32),
            np.array([it.c_mul for it in its], dtype=np.float32),
        )

    def constants(self) -> dict[str, np.float32]:
        out = {"half_factor": self.half_factor}
        for k, it in enumerate(self.iterations, start=1):
            out[f"c_add{k}"] = it.c_add
            out[f"c_mul{k}"] = it.c_mul
        return out


_BUILTIN = {
    SchemeId.CLASSIC: KernelSpec(
        MagicConstant(0x5F375A86), 0.5,
        (IterationCoeffs(1.5), IterationCoeffs(1.5)), "classic",
    ),
    SchemeId.SCHEME1: KernelSpec(
        MagicConstant(0x5F375A86), 0.50043818,
        (IterationCoeffs(1.5013145), IterationCoeffs(1.5000008, 0.99912498)), "scheme1",
    ),
    SchemeId.SCHEME2: KernelSpec(
        MagicConstant(0x5F376908), 0.5,
        (IterationCoeffs(1.5008789), IterationCoeffs(1.5000006)), "scheme2",
    ),
}


def builtin_spec(scheme) -> KernelSpec:
    return _BUILTIN[SchemeId(scheme)]


def _check_iterations(spec: KernelSpec, n_iter: int) -> None:
    if not 0 <= n_iter <= len(spec.iterations):
        raise ValueError(f"n_iter={n_iter} not in [0, {len(spec.iterations)}]")


def run_kernel(spec: KernelSpec, x, n_iter: int = 2,
               arithmetic: Arithmetic = Arithmetic.BINARY32) -> np.float32:
    """Evaluate ``spec`` on one positive normal binary32 input.

    ``n_iter=0`` returns the raw seed.
    """
    _check_iterations(spec, n_iter)
    xb = encode_bits(x)
    x = float_from_bits(xb)
    y = float_from_bits(seed_bits(spec.R, xb))
    with np.errstate(under="ignore"):
        if Arithmetic(arithmetic) is Arithmetic.X87:
            h = f32(float(spec.half_factor) * float(x))
            for it in spec.iterations[:n_iter]:
                p = float(it.c_mul) * float(h) * float(y) * float(y)
                y = f32(float(y) * (float(it.c_add) - p))
            return y
        h = spec.half_factor * x
        for it in spec.iterations[:n_iter]:
            p = it.c_mul * h
            p = p * y
            p = p * y
            y = y * (it.c_add - p)
    return y


def run_kernel_bits(spec: KernelSpec, bits: np.ndarray, n_iter: int = 2,
                    arithmetic: Arithmetic = Arithmetic.BINARY32) -> np.ndarray:
    """Vectorised ``run_kernel`` over an array of input bit patterns."""
    _check_iterations(spec, n_iter)
    c_add, c_mul = spec.coefficient_arrays()
    bits = np.ascontiguousarray(bits, dtype=np.uint32)
    x87 = int(Arithmetic(arithmetic) is Arithmetic.X87)
    return backend.get().eval_bits(
        bits, spec.R.R, spec.half_factor, c_add, c_mul, n_iter, x87
    )


def run_kernel_array(spec: KernelSpec, x: np.ndarray, n_iter: int = 2,
                     arithmetic: Arithmetic = Arithmetic.BINARY32) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float32)
    if not np.all((x >= np.finfo(np.float32).tiny) & np.isfinite(x)):
        raise DomainError("inputs must be positive normal binary32 values")
    return run_kernel_bits(spec, x.view(np.uint32), n_iter, arithmetic)


def relative_error(x, y) -> float:
    """``sqrt(x) * y - 1`` in double precision; binary32 inputs are exact in double."""
    xf = float(x)
    if not xf > 0.0 or not math.isfinite(xf):
        raise DomainError(f"expected a positive finite x, got {x!r}")
    return math.sqrt(xf) * float(y) - 1.0


def relative_error_array(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    e = np.sqrt(np.asarray(x, dtype=np.float64)) * np.asarray(y, dtype=np.float64)
    e -= 1.0
    return e
