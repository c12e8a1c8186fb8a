"""Pure-numpy renewal-cost accumulation kernels.

Fallback backend for the compiled extension in ``_renewal.pyx``.  Both
backends must produce element-for-element identical results: the per-path
accumulation order is failure index ascending, and the integer-exponent
fast path is the same chain of multiplications.
"""
from __future__ import annotations

import numpy as np


def _pow(x: np.ndarray, lam: float) -> np.ndarray:
    # Integer exponents (the default lam=3) as a multiply chain; must match
    # the compiled backend bit-for-bit.
    if lam == int(lam) and 1 <= lam <= 12:
        out = x.copy()
        for _ in range(int(lam) - 1):
            out = out * x
        return out
    return x**lam


def _ceil_idx(x: np.ndarray, size: int) -> np.ndarray:
    return np.clip(np.ceil(x).astype(np.int64), 0, size - 1)


def accumulate_pm_g(prev, lives, fails, t_grid, s, b, c, lam, d_ext):
    """Per-path sums of the failure-cost terms of the expected PM cost.

    For each path and each target month t in ``t_grid``, accumulates over
    failures with absolute time <= t the term

        b + d[ceil(fail)] - (life / (t - s))^lam * (c + d[ceil(prev + t - s)])

    where ``prev`` is the previous renewal time and ``life`` the
    inter-failure time of that failure.  Returns an array (paths, len(t_grid)).
    """
    reps, k = fails.shape
    t_grid = np.asarray(t_grid, dtype=np.float64)
    nt = t_grid.shape[0]
    size = d_ext.shape[0]
    acc = np.zeros((reps, nt))
    t_max = t_grid.max() if nt else -np.inf
    for i in range(k):
        f = fails[:, i]
        if f.min() > t_max:
            break
        L = lives[:, i]
        p = prev[:, i]
        d_fail = d_ext[_ceil_idx(f, size)]
        for ti in range(nt):
            t = t_grid[ti]
            m = f <= t
            if not m.any():
                continue
            tt = t - s
            disc = _pow(L[m] / tt, lam)
            term = b + d_fail[m] - disc * (c + d_ext[_ceil_idx(p[m] + tt, size)])
            acc[m, ti] += term
    return acc


def accumulate_horizon_cm(fails, bound, b, d_ext):
    """Per-path sums of b + d[ceil(fail)] over failures with time <= bound."""
    reps, k = fails.shape
    size = d_ext.shape[0]
    out = np.zeros(reps)
    for i in range(k):
        f = fails[:, i]
        m = f <= bound
        if not m.any():
            break
        out[m] += b + d_ext[_ceil_idx(f[m], size)]
    return out


def accumulate_shifted_cm(fails, t_grid, bound, b, d_ext):
    """Like ``accumulate_horizon_cm`` for a renewal process shifted to start
    at each month of ``t_grid``; returns (paths, len(t_grid))."""
    reps, k = fails.shape
    t_grid = np.asarray(t_grid, dtype=np.float64)
    nt = t_grid.shape[0]
    size = d_ext.shape[0]
    acc = np.zeros((reps, nt))
    t_min = t_grid.min() if nt else np.inf
    for i in range(k):
        f = fails[:, i]
        if f.min() + t_min > bound:
            break
        for ti in range(nt):
            t = t_grid[ti]
            shifted = f + t
            m = shifted <= bound
            if not m.any():
                continue
            acc[m, ti] += b + d_ext[_ceil_idx(shifted[m], size)]
    return acc
