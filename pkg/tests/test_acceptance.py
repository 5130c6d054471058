"""Reproduction criteria, each run at its stated tolerance.

Criteria 5 and 6 compare against measurements taken with x87 builds of the
kernels, so they run in the X87 arithmetic model; the strict binary32
figures are reported alongside for information.
"""

import math
import time

import numpy as np
import pytest

from fastrsqrt import error_model as em
from fastrsqrt import reference, scanner, solver
from fastrsqrt.bits import MIN_NORMAL_BITS, N_M
from fastrsqrt.kernels import Arithmetic, builtin_spec, run_kernel_bits
from conftest import record

C1 = "1 constant reproduction"
C2 = "2 code-constant emission"
C3 = "3 equal-error interval"
C4 = "4 seed-model conformance"
C5 = "5 empirical envelopes"
C6 = "6 blur statistics"
C7 = "7 property suites"

EMPIRICAL = Arithmetic.X87


def clear_caches():
    for f in (solver.solve_seed_optimum, solver.solve_classic_optimum,
              solver.solve_modified_biases, solver.solve_joint_minimizer,
              solver.equal_error_interval, solver.solve_scheme1, solver.solve_scheme2):
        f.cache_clear()


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def check(criterion, verdict: reference.Verdict):
    detail = (f"derived={verdict.derived!s} expected={verdict.expected!s} "
              f"delta={verdict.delta:.3g} tol={verdict.tol:.3g}")
    record(criterion, verdict.name, verdict.passed, detail)
    assert verdict.passed, detail


# 1 ---------------------------------------------------------------------------

CRITERION1_KEYS = [
    "seed.t", "seed.R", "seed.max_err_iter0",
    "classic.t", "classic.R", "classic.max_err_iter1", "classic.max_err_iter2",
    "modified.max_err_iter1", "modified.max_err_iter2",
    "joint.max_err_iter1", "joint.max_err_iter2",
    "scheme1.max_err_iter1", "scheme1.d2", "scheme1.max_err_iter2",
    "scheme2.t", "scheme2.R", "scheme2.d1", "scheme2.max_err_iter1",
    "scheme2.d2", "scheme2.max_err_iter2",
]
PUBLISHED = {p.key: p for ps in reference.CONSTANTS.values() for p in ps}


def test_criterion1_runtime():
    clear_caches()
    _, dt = timed(lambda: [reference.derived_values(g) for g in reference.GROUPS])
    record(C1, "solver runtime", dt < 1.0, f"{dt:.3f}s < 1s")
    assert dt < 1.0


@pytest.mark.parametrize("key", CRITERION1_KEYS)
def test_criterion1(key):
    group = key.split(".")[0]
    check(C1, reference.compare(PUBLISHED[key], reference.derived_values(group)[key]))


# 2 ---------------------------------------------------------------------------

def test_criterion2():
    clear_caches()
    verdicts, dt = timed(lambda: [v for s in reference.CODE_CONSTANTS
                                  for v in reference.check_code_constants(s)])
    assert len(verdicts) == 6
    for v in verdicts:
        record(C2, v.name, v.passed, f"{v.derived} vs {v.expected}")
    record(C2, "runtime", dt < 1.0, f"{dt:.3f}s < 1s")
    assert all(v.passed for v in verdicts) and dt < 1.0


# 3 ---------------------------------------------------------------------------

def test_criterion3():
    clear_caches()
    iv, dt = timed(solver.equal_error_interval)
    for v in reference.check_group("interval"):
        check(C3, v)
    printed = (f"{iv.t_lo:.8f}", f"{iv.t_hi:.8f}")
    ok = printed == ("3.72978085", "3.72981263")
    record(C3, "interval to 8 decimals", ok, str(printed))
    exact = list(iv.R_set) == list(range(0x5F375A5D, 0x5F375AA0 + 1))
    record(C3, "magic set", exact, f"0x{iv.R_lo:08X}..0x{iv.R_hi:08X} ({len(iv)})")
    record(C3, "runtime", dt < 1.0, f"{dt:.3f}s < 1s")
    assert ok and exact and dt < 1.0


# 4 ---------------------------------------------------------------------------

def test_criterion4():
    R = solver.solve_classic_optimum().R
    c, dt = timed(lambda: scanner.seed_conformance(R))
    check(C4, reference.bound_verdict("max abs deviation", c.max_abs, 2.0 ** -25, True))
    check(C4, reference.bound_verdict("max rel deviation", c.max_rel, 2.0 ** -24, True))
    record(C4, "runtime", dt < 10.0, f"{dt:.2f}s < 10s")
    assert dt < 10.0


# 5 ---------------------------------------------------------------------------

def default_scan(scheme, k, arithmetic=EMPIRICAL):
    cfg = scanner.ScanConfig(scanner.DEFAULT_EXPONENTS, k, arithmetic=arithmetic)
    return timed(lambda: scanner.scan(builtin_spec(scheme), cfg))


def max_abs(stats):
    return max(-stats.min, stats.max)


@pytest.mark.parametrize("scheme", ["scheme1", "scheme2"])
def test_criterion5_two_iterations(scheme):
    res, dt = default_scan(scheme, 2)
    g, edge = res.global_stats, res.per_exponent[-126]
    check(C5, reference.range_verdict(f"{scheme} global", (g.min, g.max),
                                      reference.ENVELOPES[scheme, 2], 1.5e-7))
    check(C5, reference.range_verdict(f"{scheme} exponent -126", (edge.min, edge.max),
                                      reference.EDGE_ENVELOPES[scheme, 2], 1.5e-7))
    record(C5, f"{scheme} default-set runtime", dt < 30.0, f"{dt:.1f}s < 30s")
    assert dt < 30.0
    strict, _ = default_scan(scheme, 2, Arithmetic.BINARY32)
    s = strict.global_stats
    print(f"info: strict binary32 {scheme} global [{s.min:.4g}, {s.max:.4g}], "
          f"-126 [{strict.per_exponent[-126].min:.4g}, {strict.per_exponent[-126].max:.4g}]")


@pytest.mark.parametrize("scheme", ["scheme1", "scheme2"])
def test_criterion5_one_iteration(scheme):
    res, _ = default_scan(scheme, 1)
    g = res.global_stats
    check(C5, reference.range_verdict(f"{scheme} one iteration", (g.min, g.max),
                                      reference.ENVELOPES[scheme, 1], 2e-6))


def test_criterion5_hard_bounds():
    s2, _ = default_scan("scheme2", 2)
    cl, _ = default_scan("classic", 2)
    a, b = max_abs(s2.all_stats), max_abs(cl.all_stats)
    check(C5, reference.bound_verdict("scheme2 max|error| <= 7.0e-7", a, 7.0e-7, True))
    check(C5, reference.bound_verdict("classic max|error| >= 4.4e-6", b, 4.4e-6, False))
    record(C5, "improvement factor", b / a > 6.0, f"{b / a:.2f}")
    assert b / a > 6.0
    strict2, _ = default_scan("scheme2", 2, Arithmetic.BINARY32)
    print(f"info: strict binary32 scheme2 max|error| {max_abs(strict2.all_stats):.4g}")


@pytest.mark.slow
def test_criterion5_full_domain():
    cfg = scanner.ScanConfig(scanner.FULL_EXPONENTS, 2, arithmetic=EMPIRICAL)
    res, dt = timed(lambda: scanner.scan(builtin_spec("scheme2"), cfg, workers=2))
    g = res.global_stats
    check(C5, reference.range_verdict("scheme2 global, all exponents", (g.min, g.max),
                                      reference.ENVELOPES["scheme2", 2], 1.5e-7))
    record(C5, "full-domain runtime", dt < 600.0, f"{dt:.1f}s < 600s")
    assert dt < 600.0 and g.count == 253 * N_M


# 6 ---------------------------------------------------------------------------

@pytest.mark.parametrize("scheme", ["scheme1", "scheme2"])
def test_criterion6(scheme):
    model = solver.SOLVERS[scheme]().curve(2)
    b, dt = timed(lambda: scanner.blur(builtin_spec(scheme), model, arithmetic=EMPIRICAL))
    mean, lo, hi = reference.BLUR[scheme]
    check(C6, reference.value_verdict(f"{scheme} mean", b.mean, mean, 0.3e-8))
    check(C6, reference.range_verdict(f"{scheme} range", (b.min, b.max), (lo, hi), 1e-8))
    record(C6, f"{scheme} runtime", dt < 60.0, f"{dt:.1f}s < 60s")
    assert dt < 60.0
    s = scanner.blur(builtin_spec(scheme), model, arithmetic=Arithmetic.BINARY32)
    print(f"info: strict binary32 {scheme} blur mean {s.mean:.4g} range [{s.min:.4g}, {s.max:.4g}]")


# 7 ---------------------------------------------------------------------------

@pytest.mark.parametrize("scheme", ["classic", "scheme1", "scheme2"])
@pytest.mark.parametrize("arith", list(Arithmetic))
def test_criterion7_scaling_invariance(scheme, arith):
    rng = np.random.default_rng(7)
    # keep x, x * 4**n and 0.5 * x normal: exponents in [-124, 127]
    e = rng.integers(-124, 128, size=1_000_000)
    lo = -((e + 124) // 2)
    hi = (127 - e) // 2
    n = lo + (rng.random(e.size) * (hi - lo + 1)).astype(np.int64)
    mant = rng.integers(0, N_M, size=e.size)
    bits = ((e + 127) << 23 | mant).astype(np.uint32)
    scaled = (bits.astype(np.int64) + (2 * n << 23)).astype(np.uint32)
    spec = builtin_spec(scheme)
    y = run_kernel_bits(spec, bits, 2, arith).view(np.uint32).astype(np.int64)
    ys = run_kernel_bits(spec, scaled, 2, arith).view(np.uint32).astype(np.int64)
    ok = bool(np.all(ys == y - (n << 23)))
    record(C7, f"scaling invariance {scheme} {arith.value}", ok, f"{e.size} pairs")
    assert ok and np.all(bits >= MIN_NORMAL_BITS)


@pytest.mark.parametrize("scheme", ["seed", "classic", "modified", "scheme1", "scheme2"])
def test_criterion7_equioscillation(scheme):
    s = solver.SOLVERS[scheme]()
    xs = np.concatenate([np.linspace(1.0, 4.0, 1_000_001), s.extremal_abscissae])
    if scheme == "classic":
        # the first step is one-signed; its two competing minima are balanced
        gap = abs(s.details["competing_minimum"] - s.max_err_iter1)
        worst = gap
    else:
        iters = (0,) if scheme == "seed" else (1, 2)
        worst = max(abs(v.max() + v.min()) for v in (s.curve(k)(xs) for k in iters))
    record(C7, f"equioscillation {scheme}", worst <= 1e-9, f"|max+min| = {worst:.2g}")
    assert worst <= 1e-9


def test_criterion7_nonpositivity():
    t = solver.solve_classic_optimum().t
    x = np.linspace(1.0, 4.0, 100_000)
    ok = bool(np.all(em.delta_k(x, t, 1) <= 0) and np.all(em.delta_k(x, t, 2) <= 0))
    record(C7, "nonpositivity of classic errors", ok, "100000-point grid")
    assert ok


def test_criterion7_recursion_vs_direct():
    t = solver.solve_classic_optimum().t
    x = np.linspace(1.0, 4.0, 100_000)
    y = em.y00(x, t)
    for _ in range(2):
        y = 0.5 * y * (3.0 - x * y * y)
    gap = float(np.max(np.abs(em.delta_k(x, t, 2) - (np.sqrt(x) * y - 1.0))))
    record(C7, "recursion vs direct second error", gap <= 1e-14, f"max gap {gap:.2g}")
    assert gap <= 1e-14


def test_criterion7_quadratic_residual():
    j = solver.solve_joint_minimizer()
    record(C7, "joint root residual", abs(j.residual) <= 1e-14, f"{j.residual:.2g}")
    assert abs(j.residual) <= 1e-14 and math.isfinite(j.d1)
