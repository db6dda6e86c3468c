"""Pure-Python/numpy versions of the compiled kernels.

Arithmetic is written to mirror ``_kernels.pyx`` operation by operation so
both backends agree to the last bit on the same platform.
"""

from __future__ import annotations

import math

import numpy as np


def _ula_max_error(spacing, uy, r, wavelength, method, k, n):
    y = (np.arange(n) - (n - 1) / 2.0) * spacing
    exact = np.sqrt(r * r - 2.0 * r * uy * y + y * y)
    if method == 1:
        approx = r - uy * y
    elif method == 2:
        p = uy * y
        approx = r - p + (y * y - p * p) / (2.0 * r)
    else:
        size = n // k
        approx = np.empty(n)
        for g in range(k):
            seg = y[g * size:(g + 1) * size]
            c = (g * size + (size - 1) / 2.0 - (n - 1) / 2.0) * spacing
            rg = math.sqrt(r * r - 2.0 * r * uy * c + c * c)
            approx[g * size:(g + 1) * size] = rg - (r * uy - c) * (seg - c) / rg
    return float(np.max(np.abs(approx - exact))) * 2.0 * math.pi / wavelength


def ula_crossing(spacing, ux, uy, uz, r, wavelength, method, k, threshold, n_max):
    """First symmetric ULA size whose max phase error exceeds threshold, else -1."""
    step = k if method == 3 else 1
    n = step if step >= 2 else 2
    while n <= n_max:
        if _ula_max_error(spacing, uy, r, wavelength, method, k, n) > threshold:
            return n
        n += step
    return -1


def solve_rr_batch(tx, rx, fbs, ur, r_t, total, tol_rel, max_iter=400):
    """Bisection for r_R in f(r_R) = r_T + r_R + |FBS - LBS(r_R)| - L = 0."""
    fbs = np.asarray(fbs, dtype=float)
    ur = np.asarray(ur, dtype=float)
    out = np.empty(len(r_t))
    rx0, rx1, rx2 = float(rx[0]), float(rx[1]), float(rx[2])
    for i in range(len(r_t)):
        rt = float(r_t[i])
        ell = float(total[i])
        f0, f1, f2 = fbs[i]
        u0, u1, u2 = ur[i]
        lo, hi = 0.0, ell
        mid = 0.5 * (lo + hi)
        tol = tol_rel * ell
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            d0 = f0 - (rx0 + mid * u0)
            d1 = f1 - (rx1 + mid * u1)
            d2 = f2 - (rx2 + mid * u2)
            fm = rt + mid + math.sqrt(d0 * d0 + d1 * d1 + d2 * d2) - ell
            if abs(fm) <= tol or not (lo < mid < hi):
                break
            if fm > 0.0:
                hi = mid
            else:
                lo = mid
        out[i] = mid
    return out
