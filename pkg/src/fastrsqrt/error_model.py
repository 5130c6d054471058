"""Analytic relative-error curves on the reduced interval x in [1, 4].

Everything here is evaluated in double precision and acts as the oracle for
the binary32 kernels.  Functions accept scalars or numpy arrays.

Naming: ``delta0`` is the seed error, ``delta_k`` the classic Newton-Raphson
error after k corrections, ``delta_modified`` the biased iteration with the
exact ``1/sqrt(x)`` factor, and ``delta_scheme1_*`` / ``delta_scheme2_*`` the
two realizable biased iterations (backward and forward approximation of
``1/sqrt(x)`` respectively).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bits import DomainError


def _check_t(t) -> None:
    if not np.all((np.asarray(t) > 2.0) & (np.asarray(t) < 4.0)):
        raise DomainError(f"t = {t!r} outside (2, 4)")


def _check_x(x) -> None:
    x = np.asarray(x)
    if not np.all((x >= 1.0) & (x <= 4.0)):
        raise DomainError("reduced argument must lie in [1, 4]")


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


@dataclass(frozen=True)
class SeedModel:
    """Piecewise-linear model of the seed, breakpoints at x = 2 and x = t."""

    t: float

    def __post_init__(self):
        _check_t(self.t)

    def __call__(self, x):
        return y00(x, self.t)

    @property
    def breakpoints(self) -> tuple[float, float]:
        return 2.0, self.t


def y00(x, t):
    """Seed model: slopes -1/4, -1/8, -1/16 on [1,2), [2,t), [t,4]."""
    _check_t(t)
    _check_x(x)
    x = np.asarray(x, dtype=np.float64)
    y = np.where(
        x < 2.0,
        -0.25 * x + 0.75 + t / 8.0,
        np.where(x < t, -0.125 * x + 0.5 + t / 8.0, -0.0625 * x + 0.5 + t / 16.0),
    )
    return _out(y)


def delta0(x, t):
    return _out(np.sqrt(np.asarray(x, dtype=np.float64)) * y00(x, t) - 1.0)


class Extremum(NamedTuple):
    x: float
    value: float
    kind: str  # "max" or "min"


def x_max_I(t):
    return (6.0 + t) / 6.0


def x_max_II(t):
    return (4.0 + t) / 3.0


def x_max_III(t):
    return (8.0 + t) / 3.0


def delta0_extrema(t: float) -> list[Extremum]:
    """All seven candidate extrema of the seed error, from their closed forms.

    Interior maxima at (6+t)/6, (4+t)/3, (8+t)/3; boundary minima at 1, 2, t, 4.
    """
    _check_t(t)
    s = np.sqrt
    return [
        Extremum(x_max_I(t), -1.0 + 0.5 * (1.0 + t / 6.0) ** 1.5, "max"),
        Extremum(x_max_II(t), -1.0 + 2.0 * ((1.0 + t / 4.0) / 3.0) ** 1.5, "max"),
        Extremum(x_max_III(t), -1.0 + ((2.0 / 3.0) * (1.0 + t / 8.0)) ** 1.5, "max"),
        Extremum(1.0, (t - 4.0) / 8.0, "min"),
        Extremum(2.0, s(2.0) / 4.0 * (1.0 + t / 2.0) - 1.0, "min"),
        Extremum(t, s(t) / 2.0 - 1.0, "min"),
        Extremum(4.0, (t - 4.0) / 8.0, "min"),
    ]


def delta0_min(t: float) -> Extremum:
    """Global minimum; always the boundary value at x = t."""
    return delta0_extrema(t)[5]


def delta0_max(t: float) -> Extremum:
    """Global maximum; the larger of the first two interior maxima."""
    ext = delta0_extrema(t)
    return max(ext[0], ext[1], key=lambda e: e.value)


# One-step maps between consecutive error values ---------------------------

def nr_next(delta):
    """Classic Newton-Raphson error map: -delta**2 (3 + delta) / 2."""
    delta = np.asarray(delta, dtype=np.float64)
    return _out(-0.5 * delta * delta * (3.0 + delta))


def modified_next(delta, d):
    return _out(np.asarray(nr_next(delta)) + 0.5 * d)


def _check_bias(d) -> None:
    if np.any(np.asarray(d) >= 2.0):
        raise DomainError(f"bias d = {d!r} must be < 2")


def scheme1_next(delta, d):
    """Backward-approximated bias: (d - delta**2 (3 + delta)) / (2 - d)."""
    _check_bias(d)
    delta = np.asarray(delta, dtype=np.float64)
    return _out((d - delta * delta * (3.0 + delta)) / (2.0 - d))


def scheme2_next(delta, d):
    """Forward-approximated bias: d (1 + delta) / 2 - delta**2 (3 + delta) / 2."""
    delta = np.asarray(delta, dtype=np.float64)
    return _out(0.5 * d * (1.0 + delta) - 0.5 * delta * delta * (3.0 + delta))


# Error curves ---------------------------------------------------------------

def delta_k(x, t, k: int):
    """Classic error after ``k`` corrections, by iterating ``nr_next``."""
    e = delta0(x, t)
    for _ in range(k):
        e = nr_next(e)
    return e


def delta_modified(x, t, biases):
    """Biased iteration with the exact 1/sqrt(x) factor; one bias per step."""
    e = delta0(x, t)
    for d in biases:
        e = modified_next(e, d)
    return e


def delta_scheme1_iter1(x, t, d1):
    return scheme1_next(delta0(x, t), d1)


def delta_scheme1_iter2(x, t, d1, d2):
    return scheme1_next(delta_scheme1_iter1(x, t, d1), d2)


def delta_scheme2_iter1(x, t, d1):
    return scheme2_next(delta0(x, t), d1)


def delta_scheme2_iter2(x, t, d1, d2):
    return scheme2_next(delta_scheme2_iter1(x, t, d1), d2)


def delta_plus(d):
    """Input error at which ``scheme2_next(., d)`` is stationary (its maximum)."""
    d = np.asarray(d, dtype=np.float64)
    if np.any(d <= -3.0):
        raise DomainError("delta_plus needs d > -3")
    return _out(np.sqrt(1.0 + d / 3.0) - 1.0)


def _f(t):
    u = t ** 1.5 / 8.0
    return (8.0 + u + 4.0 * np.sqrt(4.0 + u)) ** (1.0 / 3.0)


def scheme2_closed_forms(t):
    """Closed forms ``(delta_plus(t), d1(t))`` making the first scheme-2
    correction equioscillate between its maximum and its boundary value at x = t.
    """
    _check_t(t)
    f = _f(t)
    rt = np.sqrt(t)
    dplus = -1.0 - 0.25 * rt + t / (8.0 * f) + 0.5 * f
    d1 = (
        -3.0
        + 9.0 / 16.0 * t
        + 3.0 / 64.0 * t * t / (f * f)
        - 3.0 / 16.0 * t ** 1.5 / f
        - 0.75 * rt * f
        + 0.75 * f * f
    )
    return _out(dplus), _out(d1)


# Curve objects ----------------------------------------------------------------

class CurveKind(str, enum.Enum):
    SEED = "seed"
    CLASSIC = "classic"
    MODIFIED = "modified"
    SCHEME1 = "scheme1"
    SCHEME2 = "scheme2"


@dataclass(frozen=True)
class SchemeParams:
    t: float
    d1: float = 0.0
    d2: float = 0.0


@dataclass(frozen=True)
class ErrorCurve:
    """Relative error ``sqrt(x) * y_model(x) - 1`` of one scheme after
    ``iteration`` corrections."""

    kind: CurveKind
    iteration: int
    params: SchemeParams

    def __post_init__(self):
        object.__setattr__(self, "kind", CurveKind(self.kind))
        if self.kind is CurveKind.SEED and self.iteration != 0:
            raise ValueError("the seed curve has iteration 0")
        if self.kind is not CurveKind.SEED and self.iteration not in (1, 2):
            raise ValueError("iteration must be 1 or 2")
        _check_t(self.params.t)

    def __call__(self, x):
        p, k = self.params, self.iteration
        if self.kind is CurveKind.SEED:
            return delta0(x, p.t)
        if self.kind is CurveKind.CLASSIC:
            return delta_k(x, p.t, k)
        if self.kind is CurveKind.MODIFIED:
            return delta_modified(x, p.t, (p.d1, p.d2)[:k])
        step = scheme1_next if self.kind is CurveKind.SCHEME1 else scheme2_next
        e = delta0(x, p.t)
        for d in (p.d1, p.d2)[:k]:
            e = step(e, d)
        return e

    def y_model(self, x):
        """Model output approximating ``1/sqrt(x)``."""
        x = np.asarray(x, dtype=np.float64)
        return _out((1.0 + np.asarray(self(x))) / np.sqrt(x))
