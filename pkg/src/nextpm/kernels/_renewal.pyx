# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled renewal-cost accumulation kernels.

Mirrors ``_renewal_py`` exactly: same accumulation order (failure index
ascending per path) and the same integer-exponent multiply chain, so the
two backends agree element for element.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, pow

cnp.import_array()


cdef inline Py_ssize_t _ceil_idx(double x, Py_ssize_t size) nogil:
    cdef long idx = <long>ceil(x)
    if idx < 0:
        idx = 0
    if idx > size - 1:
        idx = size - 1
    return idx


cdef inline double _pow_fast(double x, double lam, int lam_int) nogil:
    cdef double out
    cdef int q
    if lam_int > 0:
        out = x
        for q in range(lam_int - 1):
            out = out * x
        return out
    return pow(x, lam)


cdef inline int _int_exponent(double lam) nogil:
    cdef int li = <int>lam
    if lam == li and 1 <= li <= 12:
        return li
    return 0


def accumulate_pm_g(double[:, ::1] prev, double[:, ::1] lives,
                    double[:, ::1] fails, double[::1] t_grid,
                    double s, double b, double c, double lam,
                    double[::1] d_ext):
    cdef Py_ssize_t reps = fails.shape[0]
    cdef Py_ssize_t k = fails.shape[1]
    cdef Py_ssize_t nt = t_grid.shape[0]
    cdef Py_ssize_t size = d_ext.shape[0]
    out_arr = np.zeros((reps, nt))
    cdef double[:, ::1] acc = out_arr
    cdef int lam_int = _int_exponent(lam)
    cdef Py_ssize_t i, r, ti
    cdef double t, tt, f, fmin, t_max, d_fail, disc, term
    if nt == 0 or reps == 0:
        return out_arr
    t_max = t_grid[0]
    for ti in range(1, nt):
        if t_grid[ti] > t_max:
            t_max = t_grid[ti]
    with nogil:
        for i in range(k):
            fmin = fails[0, i]
            for r in range(1, reps):
                if fails[r, i] < fmin:
                    fmin = fails[r, i]
            if fmin > t_max:
                break
            for r in range(reps):
                f = fails[r, i]
                d_fail = d_ext[_ceil_idx(f, size)]
                for ti in range(nt):
                    t = t_grid[ti]
                    if f <= t:
                        tt = t - s
                        disc = _pow_fast(lives[r, i] / tt, lam, lam_int)
                        term = b + d_fail - disc * (c + d_ext[_ceil_idx(prev[r, i] + tt, size)])
                        acc[r, ti] += term
    return out_arr


def accumulate_horizon_cm(double[:, ::1] fails, double bound, double b,
                          double[::1] d_ext):
    cdef Py_ssize_t reps = fails.shape[0]
    cdef Py_ssize_t k = fails.shape[1]
    cdef Py_ssize_t size = d_ext.shape[0]
    out_arr = np.zeros(reps)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, r
    cdef double f, fmin
    cdef bint any_hit
    if reps == 0:
        return out_arr
    with nogil:
        for i in range(k):
            any_hit = False
            for r in range(reps):
                f = fails[r, i]
                if f <= bound:
                    any_hit = True
                    out[r] += b + d_ext[_ceil_idx(f, size)]
            if not any_hit:
                break
    return out_arr


def accumulate_shifted_cm(double[:, ::1] fails, double[::1] t_grid,
                          double bound, double b, double[::1] d_ext):
    cdef Py_ssize_t reps = fails.shape[0]
    cdef Py_ssize_t k = fails.shape[1]
    cdef Py_ssize_t nt = t_grid.shape[0]
    cdef Py_ssize_t size = d_ext.shape[0]
    out_arr = np.zeros((reps, nt))
    cdef double[:, ::1] acc = out_arr
    cdef Py_ssize_t i, r, ti
    cdef double f, fmin, t_min, shifted
    if nt == 0 or reps == 0:
        return out_arr
    t_min = t_grid[0]
    for ti in range(1, nt):
        if t_grid[ti] < t_min:
            t_min = t_grid[ti]
    with nogil:
        for i in range(k):
            fmin = fails[0, i]
            for r in range(1, reps):
                if fails[r, i] < fmin:
                    fmin = fails[r, i]
            if fmin + t_min > bound:
                break
            for r in range(reps):
                f = fails[r, i]
                for ti in range(nt):
                    shifted = f + t_grid[ti]
                    if shifted <= bound:
                        acc[r, ti] += b + d_ext[_ceil_idx(shifted, size)]
    return out_arr
