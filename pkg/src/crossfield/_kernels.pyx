# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: ULA phase-error crossing search and twin bisection."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, M_PI

cnp.import_array()


cdef double _ula_max_error(double spacing, double uy, double r, double wavelength,
                           int method, int k, int n):
    cdef int i, g, size
    cdef double y, exact, approx, p, c, rg, err, worst = 0.0
    size = n // k
    for i in range(n):
        y = (i - (n - 1) / 2.0) * spacing
        exact = sqrt(r * r - 2.0 * r * uy * y + y * y)
        if method == 1:
            approx = r - uy * y
        elif method == 2:
            p = uy * y
            approx = r - p + (y * y - p * p) / (2.0 * r)
        else:
            g = i // size
            c = (g * size + (size - 1) / 2.0 - (n - 1) / 2.0) * spacing
            rg = sqrt(r * r - 2.0 * r * uy * c + c * c)
            approx = rg - (r * uy - c) * (y - c) / rg
        err = fabs(approx - exact)
        if err > worst:
            worst = err
    return worst * 2.0 * M_PI / wavelength


def ula_crossing(double spacing, double ux, double uy, double uz, double r, double wavelength,
                 int method, int k, double threshold, int n_max):
    """First symmetric ULA size whose max phase error exceeds threshold, else -1."""
    cdef int step = k if method == 3 else 1
    cdef int n = step if step >= 2 else 2
    while n <= n_max:
        if _ula_max_error(spacing, uy, r, wavelength, method, k, n) > threshold:
            return n
        n += step
    return -1


def solve_rr_batch(tx, rx, fbs, ur, r_t, total, double tol_rel, int max_iter=400):
    """Bisection for r_R in f(r_R) = r_T + r_R + |FBS - LBS(r_R)| - L = 0."""
    cdef double[:, ::1] F = np.ascontiguousarray(fbs, dtype=np.float64)
    cdef double[:, ::1] U = np.ascontiguousarray(ur, dtype=np.float64)
    cdef double[::1] RT = np.ascontiguousarray(r_t, dtype=np.float64)
    cdef double[::1] LL = np.ascontiguousarray(total, dtype=np.float64)
    cdef Py_ssize_t i, count = RT.shape[0]
    out = np.empty(count)
    cdef double[::1] O = out
    cdef double rx0 = rx[0], rx1 = rx[1], rx2 = rx[2]
    cdef double rt, ell, lo, hi, mid, d0, d1, d2, fm, tol
    cdef int it
    for i in range(count):
        rt = RT[i]
        ell = LL[i]
        lo = 0.0
        hi = ell
        mid = 0.5 * (lo + hi)
        tol = tol_rel * ell
        for it in range(max_iter):
            mid = 0.5 * (lo + hi)
            d0 = F[i, 0] - (rx0 + mid * U[i, 0])
            d1 = F[i, 1] - (rx1 + mid * U[i, 1])
            d2 = F[i, 2] - (rx2 + mid * U[i, 2])
            fm = rt + mid + sqrt(d0 * d0 + d1 * d1 + d2 * d2) - ell
            if fabs(fm) <= tol or not (lo < mid < hi):
                break
            if fm > 0.0:
                hi = mid
            else:
                lo = mid
        O[i] = mid
    return out
