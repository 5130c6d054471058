"""Exhaustive and sampled error scans of kernels over binary32 inputs."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from . import backend
from .bits import N_M, exponent_block, float_from_bits, magic_to_t, seed_bits_array
from .error_model import y00
from .kernels import Arithmetic, KernelSpec, relative_error_array, run_kernel_bits

DEFAULT_EXPONENTS = (-126, -125, *range(-4, 5), 126, 127)
FULL_EXPONENTS = tuple(range(-126, 128))
SUBNORMAL_EDGE = -126  # 0.5 * x is subnormal here, so its error band is wider


@dataclass(frozen=True)
class ScanConfig:
    exponents: tuple[int, ...] = DEFAULT_EXPONENTS
    iterations: int = 2
    sample: int | None = None
    seed: int = 0
    arithmetic: Arithmetic = Arithmetic.BINARY32

    def __post_init__(self):
        exps = tuple(sorted(set(int(e) for e in self.exponents)))
        if not exps:
            raise ValueError("empty exponent range")
        for e in exps:
            exponent_block(e)  # validates the range
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "arithmetic", Arithmetic(self.arithmetic))
        if self.iterations not in (0, 1, 2):
            raise ValueError("iterations must be 0, 1 or 2")
        if self.sample is not None and self.sample < 1:
            raise ValueError("sample count must be positive")

    @classmethod
    def from_range(cls, lo: int, hi: int, **kw) -> "ScanConfig":
        if hi < lo:
            raise ValueError("empty exponent range")
        return cls(tuple(range(lo, hi + 1)), **kw)

    @property
    def mode(self) -> str:
        return "exhaustive" if self.sample is None else "sampled"

    def to_dict(self) -> dict:
        return {"exponents": list(self.exponents), "iterations": self.iterations,
                "mode": self.mode, "sample": self.sample, "seed": self.seed,
                "arithmetic": self.arithmetic.value}


@dataclass(frozen=True)
class ErrorStats:
    min: float
    argmin: int
    max: float
    argmax: int
    sum: float
    count: int

    @property
    def mean(self) -> float:
        return self.sum / self.count

    @property
    def argmin_value(self) -> np.float32:
        return float_from_bits(self.argmin)

    @property
    def argmax_value(self) -> np.float32:
        return float_from_bits(self.argmax)

    @classmethod
    def merge(cls, parts: Iterable["ErrorStats"]) -> "ErrorStats":
        """Combine in the given order; ties keep the earliest part."""
        parts = list(parts)
        if not parts:
            raise ValueError("nothing to merge")
        lo = min(parts, key=lambda p: p.min)
        hi = max(parts, key=lambda p: p.max)
        return cls(lo.min, lo.argmin, hi.max, hi.argmax,
                   math.fsum(p.sum for p in parts), sum(p.count for p in parts))

    def to_dict(self) -> dict:
        return {"count": self.count, "min": self.min, "argmin_bits": f"0x{self.argmin:08X}",
                "max": self.max, "argmax_bits": f"0x{self.argmax:08X}",
                "mean": self.mean, "sum": self.sum}


def _stats_from_errors(bits: np.ndarray, e: np.ndarray) -> ErrorStats:
    i, j = int(np.argmin(e)), int(np.argmax(e))
    return ErrorStats(float(e[i]), int(bits[i]), float(e[j]), int(bits[j]),
                      math.fsum(e), int(e.size))


@dataclass
class ScanResult:
    spec: KernelSpec
    config: ScanConfig
    per_exponent: dict[int, ErrorStats] = field(default_factory=dict)

    @property
    def global_stats(self) -> ErrorStats:
        """Envelope over every scanned exponent except the subnormal edge."""
        rows = [s for e, s in sorted(self.per_exponent.items()) if e != SUBNORMAL_EDGE]
        return ErrorStats.merge(rows or self.per_exponent.values())

    @property
    def all_stats(self) -> ErrorStats:
        return ErrorStats.merge(s for _, s in sorted(self.per_exponent.items()))


def _scan_exponent(spec: KernelSpec, cfg: ScanConfig, exponent: int) -> ErrorStats:
    start, stop = exponent_block(exponent)
    x87 = int(cfg.arithmetic is Arithmetic.X87)
    if cfg.sample is None:
        c_add, c_mul = spec.coefficient_arrays()
        lo, amin, hi, amax, s, n = backend.get().scan_block(
            start, stop, spec.R.R, spec.half_factor, c_add, c_mul, cfg.iterations, x87)
        return ErrorStats(lo, amin, hi, amax, s, n)
    rng = np.random.default_rng([cfg.seed, exponent + 126])
    bits = (start + rng.integers(0, N_M, size=cfg.sample)).astype(np.uint32)
    y = run_kernel_bits(spec, bits, cfg.iterations, cfg.arithmetic)
    return _stats_from_errors(bits, relative_error_array(bits.view(np.float32), y))


def scan(spec: KernelSpec, cfg: ScanConfig | None = None, workers: int = 1) -> ScanResult:
    """Error statistics of ``spec`` per exponent.

    Exponents are independent work items; results are identical for any
    ``workers`` because each item is deterministic and merging is ordered.
    """
    cfg = cfg or ScanConfig()
    if cfg.iterations > len(spec.iterations):
        raise ValueError("kernel has fewer iterations than requested")
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda e: _scan_exponent(spec, cfg, e), cfg.exponents))
    else:
        rows = [_scan_exponent(spec, cfg, e) for e in cfg.exponents]
    return ScanResult(spec, cfg, dict(zip(cfg.exponents, rows)))


class BoundCheck(NamedTuple):
    passed: bool
    delta_min: float
    delta_max: float
    tol: float


def verify_bound(stats: ErrorStats, claimed: tuple[float, float], tol: float) -> BoundCheck:
    dmin = stats.min - claimed[0]
    dmax = stats.max - claimed[1]
    return BoundCheck(abs(dmin) <= tol and abs(dmax) <= tol, dmin, dmax, tol)


# Model-vs-code comparisons on [1, 4) -----------------------------------------

REDUCED_START, _ = exponent_block(0)
_, REDUCED_STOP = exponent_block(1)
BIN_WIDTH_BITS = 1 << 17  # 64 bins per binade


@dataclass(frozen=True)
class BinStats:
    lo: float
    hi: float
    min: float
    max: float


@dataclass(frozen=True)
class BlurStats:
    mean: float
    sum: float
    count: int
    min: float
    argmin: int
    max: float
    argmax: int
    bins: tuple[BinStats, ...]

    def to_dict(self) -> dict:
        return {"mean": self.mean, "sum": self.sum, "count": self.count,
                "min": self.min, "argmin_bits": f"0x{self.argmin:08X}",
                "max": self.max, "argmax_bits": f"0x{self.argmax:08X}",
                "bins": [b.__dict__ for b in self.bins]}


def blur(spec: KernelSpec, model, iterations: int | None = None,
         arithmetic: Arithmetic = Arithmetic.BINARY32) -> BlurStats:
    """Relative deviation of the kernel from ``model.y_model`` over all 2**24
    floats in [1, 4), with 128 per-bin envelopes (64 on [1,2), 64 on [2,4)).

    The mean is over all 2**24 values; ``sum`` is reported alongside.
    """
    k = model.iteration if iterations is None else iterations
    bins, sums = [], []
    lo = (math.inf, 0)
    hi = (-math.inf, 0)
    for a in range(REDUCED_START, REDUCED_STOP, BIN_WIDTH_BITS):
        bits = np.arange(a, a + BIN_WIDTH_BITS, dtype=np.uint32)
        x = bits.view(np.float32)
        y = run_kernel_bits(spec, bits, k, arithmetic).astype(np.float64)
        ym = np.asarray(model.y_model(x.astype(np.float64)), dtype=np.float64)
        eps = (y - ym) / ym
        i, j = int(np.argmin(eps)), int(np.argmax(eps))
        if eps[i] < lo[0]:
            lo = (float(eps[i]), a + i)
        if eps[j] > hi[0]:
            hi = (float(eps[j]), a + j)
        bins.append(BinStats(float(x[0]), float(np.nextafter(x[-1], np.float32(np.inf))),
                             float(eps[i]), float(eps[j])))
        sums.append(float(np.sum(eps)))
    total = math.fsum(sums)
    n = REDUCED_STOP - REDUCED_START
    return BlurStats(total / n, total, n, lo[0], lo[1], hi[0], hi[1], tuple(bins))


class SeedConformance(NamedTuple):
    max_abs: float
    max_rel: float
    argmax_abs: int


def seed_conformance(R) -> SeedConformance:
    """Largest gap between the piecewise-linear seed model and the bit-trick
    seed, over every binary32 value in [1, 4)."""
    t = magic_to_t(R)
    worst_abs, worst_rel, arg = 0.0, 0.0, REDUCED_START
    step = 1 << 20
    for a in range(REDUCED_START, REDUCED_STOP, step):
        bits = np.arange(a, a + step, dtype=np.uint32)
        y0 = seed_bits_array(R, bits).view(np.float32).astype(np.float64)
        ym = np.asarray(y00(bits.view(np.float32).astype(np.float64), t))
        diff = np.abs(ym - y0)
        i = int(np.argmax(diff))
        if diff[i] > worst_abs:
            worst_abs, arg = float(diff[i]), a + i
        worst_rel = max(worst_rel, float(np.max(diff / y0)))
    return SeedConformance(worst_abs, worst_rel, arg)
