"""Minimax derivation of magic constants and Newton-Raphson biases.

Every optimum is characterised by an equioscillation condition between two
extrema known in closed form, and solved by bisection on a verified
sign-changing bracket.  Results are cached; all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

from . import error_model as em
from .bits import MagicConstant, magic_to_t, t_to_magic
from .kernels import IterationCoeffs, KernelSpec

T_BRACKET = (3.7, 3.75)
T_LIMITS = (2.0 + 1e-9, 4.0 - 1e-9)


class BracketError(RuntimeError):
    """No sign change could be found for a root-finding problem."""


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 0.0,
           maxiter: int = 2000) -> float:
    """Bisection to ``xtol`` (default: until the bracket cannot shrink)."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise BracketError(f"f({lo})={flo} and f({hi})={fhi} have the same sign")
    for _ in range(maxiter):
        mid = lo + 0.5 * (hi - lo)
        if hi - lo <= xtol or not lo < mid < hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo if abs(flo) <= abs(fhi) else hi


def find_root(f: Callable[[float], float], lo: float, hi: float,
              limits: tuple[float, float] = T_LIMITS, xtol: float = 0.0) -> float:
    """Bisect on ``[lo, hi]``, widening towards ``limits`` if there is no sign change."""
    width = hi - lo
    while (f(lo) < 0.0) == (f(hi) < 0.0):
        if lo <= limits[0] and hi >= limits[1]:
            raise BracketError(f"no sign change of {f!r} on {limits}")
        width *= 2.0
        lo, hi = max(limits[0], lo - width), min(limits[1], hi + width)
    return bisect(f, lo, hi, xtol)


@dataclass(frozen=True)
class MinimaxSolution:
    scheme: str
    t: float
    R: MagicConstant
    d1: float = 0.0
    d2: float = 0.0
    max_err_iter0: float = math.nan
    max_err_iter1: float = math.nan
    max_err_iter2: float = math.nan
    extremal_abscissae: tuple[float, ...] = ()
    details: dict = field(default_factory=dict, compare=False)

    @property
    def params(self) -> em.SchemeParams:
        return em.SchemeParams(self.t, self.d1, self.d2)

    def curve(self, iteration: int) -> em.ErrorCurve:
        kind = "seed" if iteration == 0 else self.scheme
        return em.ErrorCurve(kind, iteration, self.params)

    def quantities(self) -> dict[str, float]:
        out = {"t": self.t, "R": self.R.R, "d1": self.d1, "d2": self.d2,
               "max_err_iter0": self.max_err_iter0,
               "max_err_iter1": self.max_err_iter1,
               "max_err_iter2": self.max_err_iter2}
        out.update(self.details)
        return {k: v for k, v in out.items() if not (isinstance(v, float) and math.isnan(v))}


# Seed ------------------------------------------------------------------------

def _seed_balance(which: int) -> Callable[[float], float]:
    def g(t):
        ext = em.delta0_extrema(t)
        return -ext[5].value - ext[which].value
    return g


@lru_cache(maxsize=None)
def solve_seed_optimum() -> MinimaxSolution:
    """t making |delta0(t, t)| equal to the larger interior maximum."""
    t_I = find_root(_seed_balance(0), *T_BRACKET)
    t_II = find_root(_seed_balance(1), *T_BRACKET)
    err_I = -em.delta0_min(t_I).value
    err_II = -em.delta0_min(t_II).value
    t = t_II if err_I < err_II else t_I
    dmax = max(err_I, err_II)
    d1max = _classic_iter1_max(t)
    return MinimaxSolution(
        "seed", t, MagicConstant.from_t(t),
        max_err_iter0=dmax,
        max_err_iter1=d1max,
        max_err_iter2=-em.nr_next(-d1max),
        extremal_abscissae=(em.x_max_II(t), t),
        details={"t0_I": t_I, "t0_II": t_II, "err_I": err_I, "err_II": err_II},
    )


# Classic Newton-Raphson -------------------------------------------------------

def _g(delta: float) -> float:
    return -em.nr_next(delta)


def _classic_iter1_max(t: float) -> float:
    return max(_g(em.delta0_min(t).value), _g(em.delta0_max(t).value))


def _classic_balance(t: float) -> float:
    return _g(em.delta0_min(t).value) - _g(em.delta0_max(t).value)


@lru_cache(maxsize=None)
def solve_classic_optimum() -> MinimaxSolution:
    """t minimising max|delta_1|; the same t minimises max|delta_2|."""
    t = find_root(_classic_balance, *T_BRACKET)
    d1max = _g(em.delta0_min(t).value)
    d2max = -em.nr_next(-d1max)
    return MinimaxSolution(
        "classic", t, MagicConstant.from_t(t),
        max_err_iter0=-em.delta0_min(t).value,
        max_err_iter1=d1max,
        max_err_iter2=d2max,
        extremal_abscissae=(em.x_max_II(t), t),
        details={"competing_minimum": _g(em.delta0_max(t).value)},
    )


# Modified (exact 1/sqrt(x)) biases ------------------------------------------

class ModifiedBiases(NamedTuple):
    t: float
    d1: float
    d2: float
    max_err_iter1: float
    max_err_iter2: float
    improvement: float


@lru_cache(maxsize=None)
def solve_modified_biases() -> ModifiedBiases:
    c = solve_classic_optimum()
    d1 = c.max_err_iter1
    m1 = d1 / 2.0
    m2 = 0.25 * m1 * m1 * (3.0 + m1)
    return ModifiedBiases(c.t, d1, 2.0 * m2, m1, m2, c.max_err_iter2 / m2)


def modified_solution() -> MinimaxSolution:
    m = solve_modified_biases()
    return MinimaxSolution(
        "modified", m.t, MagicConstant.from_t(m.t), m.d1, m.d2,
        max_err_iter1=m.max_err_iter1, max_err_iter2=m.max_err_iter2,
        extremal_abscissae=(em.x_max_II(m.t), m.t),
        details={"improvement": m.improvement},
    )


class JointMinimizer(NamedTuple):
    d1: float
    d2: float
    max_err_iter1: float
    min_err_iter1: float
    max_err_iter2: float
    gap: float
    residual: float


def joint_quadratic(d: float, d1max: float) -> float:
    """d**2 - 2 d (D - 2) - (4/3) D (3 - D) with D the classic first-step error."""
    return d * d - 2.0 * d * (d1max - 2.0) - 4.0 / 3.0 * d1max * (3.0 - d1max)


@lru_cache(maxsize=None)
def solve_joint_minimizer() -> JointMinimizer:
    """Bias pair minimising the second correction alone (first step unbalanced)."""
    D = solve_classic_optimum().max_err_iter1
    m = solve_modified_biases()
    # positive root of joint_quadratic, written to avoid cancellation:
    # D - 2 + 2 sqrt(1 - D**2/12)
    d1 = D - (D * D / 6.0) / (1.0 + math.sqrt(1.0 - D * D / 12.0))
    d2 = 2.0 * d1 * d1 * (3.0 + d1 / 2.0) / 16.0
    assert d1 < m.d1 and d2 / 2.0 < m.max_err_iter2
    return JointMinimizer(
        d1, d2,
        max_err_iter1=d1 / 2.0,
        min_err_iter1=d1 / 2.0 - D,
        max_err_iter2=d2 / 2.0,
        gap=m.max_err_iter2 - d2 / 2.0,
        residual=joint_quadratic(d1, D),
    )


@dataclass(frozen=True)
class EqualErrorInterval:
    t_lo: float
    t_hi: float
    R_lo: int
    R_hi: int

    @property
    def R_set(self) -> range:
        return range(self.R_lo, self.R_hi + 1)

    def __len__(self) -> int:
        return self.R_hi - self.R_lo + 1


def modified_iter2_extremes(t: float, d1: float, d2: float) -> tuple[float, float]:
    """(min, max) of the modified second-correction error at slope ``t``."""
    inner = [em.delta0_min(t).value, em.delta0_max(t).value]
    firsts = [em.modified_next(v, d1) for v in inner] + [d1 / 2.0]
    seconds = [em.modified_next(v, d2) for v in firsts]
    # the first correction also passes through 0, where the second peaks
    return min(seconds), max(seconds + [d2 / 2.0])


@lru_cache(maxsize=None)
def equal_error_interval() -> EqualErrorInterval:
    """Range of t (and magic constants) keeping the modified second error minimal."""
    m = solve_modified_biases()

    def balance(x_of_t):
        # second modified correction at the given abscissa, plus the optimum error
        return lambda t: em.delta_modified(x_of_t(t), t, (m.d1, m.d2)) + m.max_err_iter2

    lo = find_root(balance(lambda t: t), T_BRACKET[0], m.t)
    hi = find_root(balance(em.x_max_II), m.t, T_BRACKET[1])
    return EqualErrorInterval(lo, hi, t_to_magic(lo), t_to_magic(hi))


# Realisable schemes -------------------------------------------------------------

@lru_cache(maxsize=None)
def solve_scheme1() -> MinimaxSolution:
    c = solve_classic_optimum()
    D = c.max_err_iter1
    d2 = D * D * (3.0 - D) / (2.0 - D) ** 3
    a1 = D / (2.0 - D)
    a2 = d2 / (2.0 - d2)
    return MinimaxSolution(
        "scheme1", c.t, MagicConstant.from_t(c.t), D, d2,
        max_err_iter0=c.max_err_iter0,
        max_err_iter1=a1,
        max_err_iter2=a2,
        extremal_abscissae=(em.x_max_II(c.t), c.t),
        details={"ratio_iter1": D / a1, "ratio_iter2": c.max_err_iter2 / a2},
    )


def _scheme2_balance(t: float) -> float:
    _, d1 = em.scheme2_closed_forms(t)
    return (em.scheme2_next(em.delta0_min(t).value, d1)
            - em.scheme2_next(em.delta0_extrema(t)[1].value, d1))


def scheme2_d1_direct(t: float) -> float:
    """d1 equating the scheme-2 first-step maximum with |value at x = t|, by bisection.

    Independent of the closed form in ``error_model.scheme2_closed_forms``.
    """
    d0 = em.delta0_min(t).value

    def h(d):
        return em.scheme2_next(em.delta_plus(d), d) + em.scheme2_next(d0, d)

    return bisect(h, 0.0, 0.01)


def scheme2_d2(a1: float) -> float:
    """Second bias balancing the peak against the minimum fed by -a1."""

    def h(d):
        return em.scheme2_next(em.delta_plus(d), d) + em.scheme2_next(-a1, d)

    return bisect(h, 0.0, 1e-4)


@lru_cache(maxsize=None)
def solve_scheme2() -> MinimaxSolution:
    t = find_root(_scheme2_balance, *T_BRACKET)
    dplus, d1 = em.scheme2_closed_forms(t)
    a1 = em.scheme2_next(em.delta_plus(d1), d1)
    d2 = scheme2_d2(a1)
    a2 = em.scheme2_next(em.delta_plus(d2), d2)
    D = solve_classic_optimum()
    return MinimaxSolution(
        "scheme2", t, MagicConstant.from_t(t), d1, d2,
        max_err_iter0=-em.delta0_min(t).value,
        max_err_iter1=a1,
        max_err_iter2=a2,
        extremal_abscissae=(em.x_max_II(t), t),
        details={"delta_plus": dplus,
                 "ratio_iter1": D.max_err_iter1 / a1,
                 "ratio_iter2": D.max_err_iter2 / a2},
    )


SOLVERS = {
    "seed": solve_seed_optimum,
    "classic": solve_classic_optimum,
    "modified": modified_solution,
    "scheme1": solve_scheme1,
    "scheme2": solve_scheme2,
}


def code_constants_real(solution: MinimaxSolution) -> dict[str, float]:
    """Kernel coefficients in double precision, before rounding to binary32.

    Scheme 1 folds ``1/(2 - d)`` into the half factor and multipliers; every
    other scheme puts the bias into the additive constant ``(3 + d)/2``.
    """
    d1, d2 = solution.d1, solution.d2
    if solution.scheme == "scheme1":
        return {"half_factor": 1.0 / (2.0 - d1),
                "c_add1": 3.0 / (2.0 - d1), "c_mul1": 1.0,
                "c_add2": 3.0 / (2.0 - d2), "c_mul2": (2.0 - d1) / (2.0 - d2)}
    return {"half_factor": 0.5, "c_add1": (3.0 + d1) / 2.0, "c_mul1": 1.0,
            "c_add2": (3.0 + d2) / 2.0, "c_mul2": 1.0}


def emit_code_constants(solution: MinimaxSolution) -> KernelSpec:
    """Round the solved biases into the binary32 constants of a kernel."""
    c = code_constants_real(solution)
    iters = (IterationCoeffs(c["c_add1"], c["c_mul1"]),
             IterationCoeffs(c["c_add2"], c["c_mul2"]))
    return KernelSpec(solution.R, c["half_factor"], iters, solution.scheme)


def magic_set_t(interval: EqualErrorInterval) -> list[float]:
    return [magic_to_t(R) for R in interval.R_set]
