import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fastrsqrt.bits import MIN_NORMAL_BITS, DomainError, float_from_bits
from fastrsqrt.kernels import (
    Arithmetic,
    IterationCoeffs,
    KernelSpec,
    builtin_spec,
    relative_error,
    relative_error_array,
    run_kernel,
    run_kernel_array,
    run_kernel_bits,
)
from conftest import random_normal_bits

SCHEMES = ["classic", "scheme1", "scheme2"]
f32 = np.float32


def listing(x: float, R: int, half: float, steps, n_iter: int) -> np.float32:
    """Straight transcription of the C listing with numpy binary32 scalars."""
    x = f32(x)
    h = f32(half) * x
    i = np.array([x], dtype=f32).view(np.uint32)[0]
    y = np.array([np.uint32(R) - (i >> np.uint32(1))], dtype=np.uint32).view(f32)[0]
    for c_add, c_mul in steps[:n_iter]:
        y = y * (f32(c_add) - f32(c_mul) * h * y * y)
    return y


@pytest.mark.parametrize("x", [1.0, 2.0, 3.0, 0.15625, f32(1e30), f32(4.7019774e-38)])
@pytest.mark.parametrize("n_iter", [0, 1, 2])
def test_scheme1_matches_listing(x, n_iter):
    got = run_kernel(builtin_spec("scheme1"), x, n_iter)
    want = listing(x, 0x5F375A86, 0.50043818,
                   [(1.5013145, 1.0), (1.5000008, 0.99912498)], n_iter)
    assert got.view(np.uint32) == want.view(np.uint32)


@given(st.integers(MIN_NORMAL_BITS * 4, 0x7F7FFFFF))
@settings(max_examples=300)
def test_scheme2_matches_listing(b):
    x = float(float_from_bits(b))
    got = run_kernel(builtin_spec("scheme2"), x, 2)
    want = listing(x, 0x5F376908, 0.5, [(1.5008789, 1.0), (1.5000006, 1.0)], 2)
    assert got.view(np.uint32) == want.view(np.uint32)


def test_classic_one_iteration():
    y = run_kernel(builtin_spec("classic"), 4.0, 1)
    assert abs(float(y) - 0.5) < 2e-3


def test_seed_only():
    spec = builtin_spec("classic")
    assert run_kernel(spec, 1.0, 0).view(np.uint32) == 0x5F375A86 - (0x3F800000 >> 1)


@pytest.mark.parametrize("x", [0.0, -2.0, math.inf, math.nan, 1e-40])
def test_rejects_bad_input(x):
    with pytest.raises(DomainError):
        run_kernel(builtin_spec("scheme2"), x)


def test_rejects_too_many_iterations():
    spec = KernelSpec(0x5F375A86, 0.5, (IterationCoeffs(1.5),))
    with pytest.raises(ValueError):
        run_kernel(spec, 1.0, 2)


def test_spec_validates_iteration_count():
    with pytest.raises(ValueError):
        KernelSpec(0x5F375A86, 0.5, ())


@pytest.mark.parametrize("scheme", SCHEMES)
@pytest.mark.parametrize("arith", list(Arithmetic))
def test_array_matches_scalar(scheme, arith, rng):
    spec = builtin_spec(scheme)
    bits = random_normal_bits(rng, 400)
    ys = run_kernel_bits(spec, bits, 2, arith)
    for b, y in zip(bits, ys):
        assert run_kernel(spec, float_from_bits(int(b)), 2, arith).view(np.uint32) == \
            y.view(np.uint32)


def test_run_kernel_array_rejects_subnormal():
    with pytest.raises(DomainError):
        run_kernel_array(builtin_spec("classic"), np.array([1.0, 1e-40], dtype=np.float32))


@pytest.mark.parametrize("scheme", SCHEMES)
def test_x87_mode_differs_but_stays_close(scheme, rng):
    spec = builtin_spec(scheme)
    bits = random_normal_bits(rng, 20000, lo=0x3F800000, hi=0x407FFFFF)
    a = run_kernel_bits(spec, bits, 2, Arithmetic.BINARY32).astype(np.float64)
    b = run_kernel_bits(spec, bits, 2, Arithmetic.X87).astype(np.float64)
    assert np.any(a != b)
    assert np.max(np.abs(a - b) / b) < 4 * 2.0 ** -24


def test_relative_error_exact_cases():
    assert relative_error(4.0, 0.5) == 0.0
    assert relative_error(np.float32(1.0), np.float32(1.0)) == 0.0
    with pytest.raises(DomainError):
        relative_error(0.0, 1.0)


def test_relative_error_array_is_double(rng):
    x = (rng.random(100) * 3 + 1).astype(np.float32)
    y = (1 / np.sqrt(x.astype(np.float64))).astype(np.float32)
    e = relative_error_array(x, y)
    assert e.dtype == np.float64
    assert np.all(np.abs(e) <= 2.0 ** -24)
    for xi, yi, ei in zip(x, y, e):
        assert relative_error(xi, yi) == ei


def test_builtin_constants_are_listing_values():
    s1 = builtin_spec("scheme1").constants()
    assert s1["half_factor"] == f32(0.50043818)
    assert s1["c_mul2"] == f32(0.99912498)
    assert builtin_spec("scheme2").R.R == 0x5F376908
