"""Pure numpy implementation of the hot loops in ``_core``.

numpy ufuncs round after every operation and never fuse, so this matches the
compiled core bit-for-bit on kernel outputs and error extremes.
"""

import math

import numpy as np

CHUNK = 1 << 20


def eval_bits(bits, R, half, c_add, c_mul, n_iter, x87=0):
    bits = np.ascontiguousarray(bits, dtype=np.uint32)
    x = bits.view(np.float32)
    y = (np.uint32(R) - (bits >> np.uint32(1))).view(np.float32)
    with np.errstate(under="ignore"):
        if x87:
            h = (np.float64(half) * x.astype(np.float64)).astype(np.float32)
            h = h.astype(np.float64)
            for k in range(n_iter):
                yd = y.astype(np.float64)
                p = np.float64(np.float32(c_mul[k])) * h
                p *= yd
                p *= yd
                y = (yd * (np.float64(np.float32(c_add[k])) - p)).astype(np.float32)
            return y
        h = np.float32(half) * x
        for k in range(n_iter):
            p = np.float32(c_mul[k]) * h
            p *= y
            p *= y
            y = y * (np.float32(c_add[k]) - p)
    return y


def scan_block(start, stop, R, half, c_add, c_mul, n_iter, x87=0):
    if stop <= start:
        raise ValueError("empty bit range")
    lo, hi = math.inf, -math.inf
    amin = amax = start
    partial = []
    for a in range(start, stop, CHUNK):
        bits = np.arange(a, min(a + CHUNK, stop), dtype=np.uint32)
        y = eval_bits(bits, R, half, c_add, c_mul, n_iter, x87)
        e = np.sqrt(bits.view(np.float32).astype(np.float64)) * y.astype(np.float64)
        e -= 1.0
        i = int(np.argmin(e))
        if e[i] < lo:
            lo, amin = float(e[i]), a + i
        i = int(np.argmax(e))
        if e[i] > hi:
            hi, amax = float(e[i]), a + i
        partial.append(float(np.sum(e)))
    return lo, amin, hi, amax, math.fsum(partial), stop - start
