import numpy as np
import pytest

from fastrsqrt import scanner, solver
from fastrsqrt.bits import N_M, float_from_bits, seed_bits_array
from fastrsqrt.kernels import Arithmetic, builtin_spec, relative_error, run_kernel

SCHEMES = ["classic", "scheme1", "scheme2"]


@pytest.mark.parametrize("scheme", SCHEMES)
@pytest.mark.parametrize("e", [-124, -7, 0, 3, 90])
def test_exponent_translation_invariance(scheme, e, each_backend):
    spec = builtin_spec(scheme)
    r = scanner.scan(spec, scanner.ScanConfig((e, e + 2)))
    a, b = r.per_exponent[e], r.per_exponent[e + 2]
    assert (a.min, a.max, a.sum, a.count) == (b.min, b.max, b.sum, b.count)
    assert b.argmin - a.argmin == 2 * N_M and b.argmax - a.argmax == 2 * N_M


def test_interior_envelope_equals_one_exponent_pair():
    spec = builtin_spec("scheme2")
    pair = scanner.scan(spec, scanner.ScanConfig((10, 11))).all_stats
    wide = scanner.scan(spec, scanner.ScanConfig((-120, -47, 0, 1, 64, 120))).all_stats
    assert (pair.min, pair.max) == (wide.min, wide.max)


@pytest.mark.parametrize("scheme", SCHEMES)
@pytest.mark.parametrize("arith", list(Arithmetic))
def test_arg_extremes_reproduce(scheme, arith):
    spec = builtin_spec(scheme)
    r = scanner.scan(spec, scanner.ScanConfig((-126, 0, 1), arithmetic=arith))
    for s in r.per_exponent.values():
        for bits, want in ((s.argmin, s.min), (s.argmax, s.max)):
            x = float_from_bits(bits)
            assert relative_error(x, run_kernel(spec, x, 2, arith)) == want
        assert s.min <= s.mean <= s.max


def test_sampled_within_exhaustive():
    spec = builtin_spec("scheme1")
    full = scanner.scan(spec, scanner.ScanConfig((-3, -2))).all_stats
    part = scanner.scan(spec, scanner.ScanConfig((-3, -2), sample=5000, seed=9)).all_stats
    assert full.min <= part.min and part.max <= full.max
    assert part.count == 10000


def test_sampled_reproducible():
    spec = builtin_spec("scheme2")
    cfg = scanner.ScanConfig((0, 1, 2), sample=2000, seed=4)
    assert scanner.scan(spec, cfg).per_exponent == scanner.scan(spec, cfg).per_exponent
    other = scanner.scan(spec, scanner.ScanConfig((0, 1, 2), sample=2000, seed=5))
    assert other.per_exponent != scanner.scan(spec, cfg).per_exponent


def test_workers_do_not_change_results():
    spec = builtin_spec("scheme1")
    cfg = scanner.ScanConfig((-126, -1, 0, 5))
    assert scanner.scan(spec, cfg, 1).per_exponent == scanner.scan(spec, cfg, 3).per_exponent


def test_global_excludes_subnormal_edge():
    r = scanner.scan(builtin_spec("classic"), scanner.ScanConfig((-126, 0)))
    assert r.global_stats == r.per_exponent[0]
    assert r.all_stats.count == 2 * N_M
    only_edge = scanner.scan(builtin_spec("classic"), scanner.ScanConfig((-126,)))
    assert only_edge.global_stats == only_edge.per_exponent[-126]


def test_one_iteration_and_seed_scans():
    spec = builtin_spec("scheme2")
    r1 = scanner.scan(spec, scanner.ScanConfig((0, 1), iterations=1)).all_stats
    assert 8.7e-4 < max(-r1.min, r1.max) < 8.9e-4
    r0 = scanner.scan(spec, scanner.ScanConfig((0, 1), iterations=0)).all_stats
    assert max(-r0.min, r0.max) == pytest.approx(0.0344, abs=5e-4)


@pytest.mark.parametrize("kw", [dict(exponents=()), dict(exponents=(128,)),
                                dict(iterations=3), dict(sample=0)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        scanner.ScanConfig(**kw)


def test_from_range():
    assert scanner.ScanConfig.from_range(-2, 1).exponents == (-2, -1, 0, 1)
    with pytest.raises(ValueError):
        scanner.ScanConfig.from_range(3, 1)


def test_stats_merge_and_mean():
    a = scanner.ErrorStats(-2.0, 1, 1.0, 2, 1.0, 4)
    b = scanner.ErrorStats(-1.0, 3, 3.0, 4, -3.0, 4)
    m = scanner.ErrorStats.merge([a, b])
    assert (m.min, m.argmin, m.max, m.argmax, m.count) == (-2.0, 1, 3.0, 4, 8)
    assert m.mean == -0.25
    with pytest.raises(ValueError):
        scanner.ErrorStats.merge([])


def test_verify_bound():
    s = scanner.ErrorStats(-6.2e-7, 0, 6.5e-7, 0, 0.0, 1)
    assert scanner.verify_bound(s, (-6.2e-7, 6.5e-7), 0.0).passed
    r = scanner.verify_bound(s, (-6.62e-7, 6.35e-7), 1e-8)
    assert not r.passed
    assert r.delta_min == pytest.approx(4.2e-8) and r.delta_max == pytest.approx(1.5e-8)


class ExactModel:
    """Same kernel, re-evaluated entirely in double precision."""

    iteration = 2

    def __init__(self, spec):
        self.spec = spec

    def y_model(self, x):
        x = np.asarray(x, dtype=np.float64)
        y = seed_bits_array(self.spec.R.R, x.astype(np.float32).view(np.uint32))
        y = y.view(np.float32).astype(np.float64)
        h = float(self.spec.half_factor) * x
        for it in self.spec.iterations:
            y = y * (float(it.c_add) - float(it.c_mul) * h * y * y)
        return y


@pytest.mark.parametrize("scheme", SCHEMES)
def test_blur_self_comparison_collapses(scheme):
    spec = builtin_spec(scheme)
    b = scanner.blur(spec, ExactModel(spec), arithmetic=Arithmetic.X87)
    assert abs(b.mean) < 1e-10
    assert max(-b.min, b.max) <= 1.5 * 2.0 ** -24


def test_blur_bins_partition_reduced_interval():
    s = solver.solve_scheme2()
    b = scanner.blur(builtin_spec("scheme2"), s.curve(2))
    assert len(b.bins) == 128 and b.count == 2 * N_M
    assert b.bins[0].lo == 1.0 and b.bins[-1].hi == 4.0
    assert all(p.hi == q.lo for p, q in zip(b.bins, b.bins[1:]))
    assert b.bins[63].hi == 2.0
    assert min(x.min for x in b.bins) == b.min and max(x.max for x in b.bins) == b.max
    assert b.mean == pytest.approx(b.sum / b.count)


def test_seed_conformance_bounds():
    c = scanner.seed_conformance(0x5F375A86)
    assert c.max_abs <= 2.0 ** -25 and c.max_rel <= 2.0 ** -24
