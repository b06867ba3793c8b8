"""Brute-force oracle for the synthetic landscapes and the valid-set count.

Independent of the C++ implementation: evaluates the closed-form landscape
formulas with numpy over the full box and prints the values frozen into the
C++ fixtures (tests/fixtures.hpp).
"""
import itertools
import math

import numpy as np

PENALTY = 10000.0


def count_valid(wg_hi=8, limit=256, thread_hi=16):
    n = 0
    for a in range(1, wg_hi + 1):
        for b in range(1, wg_hi + 1):
            for c in range(1, wg_hi + 1):
                if a * b * c <= limit:
                    n += 1
    return n * thread_hi ** 3


def landscape(kind, xt, yt, zt, xw, yw, zw):
    T = xt * yt * zt
    W = xw * yw * zw
    if W > 256:
        return PENALTY
    warp = W / (32.0 * math.ceil(W / 32.0))
    v = 1.0 + 0.6 * (1.0 - warp) + 0.25 * abs(math.log2(T) - 1.0) + 0.15 * abs(math.log2(W) - 5.0)
    if kind == "harris":
        v += 0.4 * abs(math.log2(xw) - math.log2(yw)) + (0.2 if zw > 1 else 0.0)
    elif kind == "mandelbrot":
        v += 0.3 * (1.0 + math.sin(xt * yw + yt * xw)) / 2.0
    return v


def optimum(kind, t_hi=16, w_hi=8):
    best = None
    for c in itertools.product(range(1, t_hi + 1), range(1, t_hi + 1), range(1, t_hi + 1),
                               range(1, w_hi + 1), range(1, w_hi + 1), range(1, w_hi + 1)):
        if c[3] * c[4] * c[5] > 256:
            continue
        v = landscape(kind, *c)
        if best is None or v < best[1]:
            best = (c, v)
    return best


def max_valid(kind):
    best = 0.0
    for c in itertools.product(range(1, 17), repeat=3):
        for w in itertools.product(range(1, 9), repeat=3):
            if w[0] * w[1] * w[2] <= 256:
                best = max(best, landscape(kind, *c, *w))
    return best


if __name__ == "__main__":
    print("N_valid default:", count_valid())
    print("valid fraction:", count_valid() / 2097152)
    for kind in ("add", "harris", "mandelbrot"):
        c, v = optimum(kind)
        print(f"{kind} optimum default: {c} {v!r}")
        c, v = optimum(kind, t_hi=4, w_hi=2)
        print(f"{kind} optimum reduced(4,2): {c} {v!r}")
    print("add (2,1,1,8,8,4):", repr(landscape("add", 2, 1, 1, 8, 8, 4)))
