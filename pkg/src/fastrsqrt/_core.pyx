# cython: language_level=3
"""Compiled hot loops: kernel evaluation and error reduction over bit ranges.

Two arithmetic models, selected by ``x87``:

* 0: every operation rounds to binary32 (SSE semantics).
* 1: each source line is evaluated in wider precision and rounded to binary32
  on assignment, as 32-bit x87 code does.  Double intermediates reproduce
  80-bit results exactly on these kernels.

The extension is built with -ffp-contract=off so no FMA is formed.  Must agree
bit-for-bit with ``_fallback``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from libc.stdint cimport uint32_t, int64_t

cnp.import_array()


cdef union FloatBits:
    float f
    uint32_t u


cdef inline float _kernel(uint32_t bits, uint32_t R, float half,
                          float ca0, float cm0, float ca1, float cm1,
                          int n_iter) noexcept nogil:
    cdef FloatBits xb, yb
    cdef float h, y, p
    xb.u = bits
    h = half * xb.f
    yb.u = R - (bits >> 1)
    y = yb.f
    if n_iter >= 1:
        p = cm0 * h
        p = p * y
        p = p * y
        y = y * (ca0 - p)
    if n_iter >= 2:
        p = cm1 * h
        p = p * y
        p = p * y
        y = y * (ca1 - p)
    return y


cdef inline float _kernel_x87(uint32_t bits, uint32_t R, float half,
                              float ca0, float cm0, float ca1, float cm1,
                              int n_iter) noexcept nogil:
    cdef FloatBits xb, yb
    cdef float h, y
    cdef double p
    xb.u = bits
    h = <float>(<double>half * <double>xb.f)
    yb.u = R - (bits >> 1)
    y = yb.f
    if n_iter >= 1:
        p = <double>cm0 * <double>h
        p = p * <double>y
        p = p * <double>y
        y = <float>(<double>y * (<double>ca0 - p))
    if n_iter >= 2:
        p = <double>cm1 * <double>h
        p = p * <double>y
        p = p * <double>y
        y = <float>(<double>y * (<double>ca1 - p))
    return y


cdef inline float _dispatch(uint32_t bits, uint32_t R, float half,
                            float ca0, float cm0, float ca1, float cm1,
                            int n_iter, int x87) noexcept nogil:
    if x87:
        return _kernel_x87(bits, R, half, ca0, cm0, ca1, cm1, n_iter)
    return _kernel(bits, R, half, ca0, cm0, ca1, cm1, n_iter)


def eval_bits(uint32_t[::1] bits, uint32_t R, float half, c_add, c_mul, int n_iter,
              int x87=0):
    """Kernel outputs (binary32) for an array of input bit patterns."""
    cdef Py_ssize_t i, n = bits.shape[0]
    cdef float ca0 = c_add[0], cm0 = c_mul[0]
    cdef float ca1 = c_add[1], cm1 = c_mul[1]
    out = np.empty(n, dtype=np.float32)
    cdef float[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _dispatch(bits[i], R, half, ca0, cm0, ca1, cm1, n_iter, x87)
    return out


def scan_block(uint32_t start, uint32_t stop, uint32_t R, float half,
               c_add, c_mul, int n_iter, int x87=0):
    """Reduce ``sqrt(x) * kernel(x) - 1`` over bit patterns in ``[start, stop)``.

    Returns ``(min, argmin_bits, max, argmax_bits, sum, count)``.  Extremes keep
    the first occurrence; the sum is Neumaier-compensated.
    """
    cdef float ca0 = c_add[0], cm0 = c_mul[0]
    cdef float ca1 = c_add[1], cm1 = c_mul[1]
    cdef uint32_t b, amin = start, amax = start
    cdef double e, lo = 1e300, hi = -1e300, s = 0.0, c = 0.0, tmp
    cdef FloatBits xb
    cdef float y
    if stop <= start:
        raise ValueError("empty bit range")
    with nogil:
        b = start
        while b < stop:
            xb.u = b
            y = _dispatch(b, R, half, ca0, cm0, ca1, cm1, n_iter, x87)
            e = sqrt(<double>xb.f) * <double>y
            e = e - 1.0
            if e < lo:
                lo = e
                amin = b
            if e > hi:
                hi = e
                amax = b
            tmp = s + e
            if (s if s >= 0 else -s) >= (e if e >= 0 else -e):
                c += (s - tmp) + e
            else:
                c += (e - tmp) + s
            s = tmp
            b += 1
    return lo, int(amin), hi, int(amax), s + c, int(<int64_t>stop - <int64_t>start)
