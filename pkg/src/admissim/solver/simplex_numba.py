"""Numba-jitted bounded-variable two-phase primal simplex.

Mirror of simplex_numpy.lp_solve with the same entering/leaving rules and
tolerances; loops instead of vectorized ops.  Compiled lazily with
cache=True so repeat runs skip JIT cost.
"""

from __future__ import annotations

import numpy as np
from numba import njit

PIV_TOL = 1e-9
OPT_TOL = 1e-9
FEAS_TOL = 1e-7
TIE_TOL = 1e-9
DEGEN_LIMIT = 2000


@njit(cache=True)
def _kernel(A, b, is_eq, c, lb, ub, maxiter):  # pragma: no cover - jitted
    m, n = A.shape
    N = n + 2 * m
    T = np.zeros((m, N))
    for i in range(m):
        for k in range(n):
            T[i, k] = A[i, k]
    lo = np.zeros(N)
    hi = np.zeros(N)
    for k in range(n):
        lo[k] = lb[k]
        hi[k] = ub[k]
    xval = np.zeros(N)
    for k in range(n):
        xval[k] = lb[k]
    beta = np.zeros(m)
    basis = np.zeros(m, dtype=np.int64)
    vstat = np.zeros(N, dtype=np.int8)

    any_art = False
    for i in range(m):
        resid = b[i]
        for k in range(n):
            resid -= A[i, k] * lb[k]
        T[i, n + i] = 1.0
        hi[n + i] = 0.0 if is_eq[i] else np.inf
        if is_eq[i]:
            slack_ok = abs(resid) <= FEAS_TOL
        else:
            slack_ok = resid >= -FEAS_TOL
        if slack_ok:
            basis[i] = n + i
            vstat[n + i] = 2
            beta[i] = resid
        else:
            sign = 1.0 if resid > 0 else -1.0
            T[i, n + m + i] = sign
            if sign < 0:
                for k in range(N):
                    T[i, k] = -T[i, k]
            hi[n + m + i] = np.inf
            basis[i] = n + m + i
            vstat[n + m + i] = 2
            beta[i] = abs(resid)
            any_art = True

    cost = np.zeros(N)
    phase = 2
    if any_art:
        phase = 1
        for i in range(m):
            if basis[i] >= n + m:
                cost[basis[i]] = 1.0
    else:
        for k in range(n):
            cost[k] = c[k]
    d = np.zeros(N)
    for k in range(N):
        d[k] = cost[k]
    for i in range(m):
        cb = cost[basis[i]]
        if cb != 0.0:
            for k in range(N):
                d[k] -= cb * T[i, k]

    x = np.zeros(n)
    iters = 0
    bland = False
    degen_run = 0

    while True:
        if iters >= maxiter:
            return 3, x, 0.0, iters
        # pricing
        j = -1
        if bland:
            for k in range(N):
                if hi[k] - lo[k] <= 1e-12:
                    continue
                if vstat[k] == 0 and -d[k] > OPT_TOL:
                    j = k
                    break
                if vstat[k] == 1 and d[k] > OPT_TOL:
                    j = k
                    break
        else:
            best = -np.inf
            for k in range(N):
                if hi[k] - lo[k] <= 1e-12:
                    continue
                if vstat[k] == 0:
                    s = -d[k]
                elif vstat[k] == 1:
                    s = d[k]
                else:
                    continue
                if s > best:
                    best = s
                    j = k
            if j >= 0 and best <= OPT_TOL:
                j = -1
        if j < 0:
            if phase == 1:
                p1 = 0.0
                for i in range(m):
                    if basis[i] >= n + m:
                        p1 += beta[i]
                if p1 > FEAS_TOL:
                    return 1, x, 0.0, iters
                for k in range(n + m, N):
                    hi[k] = 0.0
                for k in range(N):
                    cost[k] = c[k] if k < n else 0.0
                for k in range(N):
                    d[k] = cost[k]
                for i in range(m):
                    cb = cost[basis[i]]
                    if cb != 0.0:
                        for k in range(N):
                            d[k] -= cb * T[i, k]
                phase = 2
                bland = False
                degen_run = 0
                continue
            break

        dirn = 1.0 if vstat[j] == 0 else -1.0

        # ratio test (pass 1: min limit)
        tmin = np.inf
        for i in range(m):
            g = dirn * T[i, j]
            if g > PIV_TOL:
                t = (beta[i] - lo[basis[i]]) / g
            elif g < -PIV_TOL:
                h = hi[basis[i]]
                if not np.isfinite(h):
                    continue
                t = (h - beta[i]) / (-g)
            else:
                continue
            if t < 0.0:
                t = 0.0
            if t < tmin:
                tmin = t

        span = hi[j] - lo[j]
        if span <= tmin + TIE_TOL:
            if not np.isfinite(span):
                return 2, x, 0.0, iters
            for i in range(m):
                beta[i] -= dirn * span * T[i, j]
            vstat[j] = 1 - vstat[j]
            xval[j] = hi[j] if vstat[j] == 1 else lo[j]
            iters += 1
            degen_run = degen_run + 1 if span <= 1e-10 else 0
            if degen_run > DEGEN_LIMIT:
                bland = True
            continue

        # pass 2: among ties, smallest basis column
        r = -1
        best_col = np.int64(1 << 60)
        r_to_ub = False
        for i in range(m):
            g = dirn * T[i, j]
            if g > PIV_TOL:
                t = (beta[i] - lo[basis[i]]) / g
                up = False
            elif g < -PIV_TOL:
                h = hi[basis[i]]
                if not np.isfinite(h):
                    continue
                t = (h - beta[i]) / (-g)
                up = True
            else:
                continue
            if t < 0.0:
                t = 0.0
            if t <= tmin + TIE_TOL and basis[i] < best_col:
                best_col = basis[i]
                r = i
                r_to_ub = up
        t = tmin

        enter_val = (lo[j] if dirn > 0 else hi[j]) + dirn * t
        w_r = T[r, j]
        for i in range(m):
            beta[i] -= dirn * t * T[i, j]
        leaving = basis[r]
        if r_to_ub:
            vstat[leaving] = 1
            xval[leaving] = hi[leaving]
        else:
            vstat[leaving] = 0
            xval[leaving] = lo[leaving]
        beta[r] = enter_val
        basis[r] = j
        vstat[j] = 2

        piv = w_r
        for k in range(N):
            T[r, k] /= piv
        for i in range(m):
            if i == r:
                continue
            f = T[i, j]
            if f != 0.0:
                for k in range(N):
                    T[i, k] -= f * T[r, k]
        dj = d[j]
        if dj != 0.0:
            for k in range(N):
                d[k] -= dj * T[r, k]

        iters += 1
        degen_run = degen_run + 1 if t <= 1e-10 else 0
        if degen_run > DEGEN_LIMIT:
            bland = True

    for k in range(n):
        xval_k = xval[k]
        x[k] = xval_k
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = beta[i]
    for k in range(n):
        if x[k] < lb[k]:
            x[k] = lb[k]
        elif x[k] > ub[k]:
            x[k] = ub[k]
    obj = 0.0
    for k in range(n):
        obj += c[k] * x[k]
    return 0, x, obj, iters


def lp_solve(A, b, is_eq, c, lb, ub, maxiter=0):
    m, n = A.shape
    if maxiter <= 0:
        maxiter = 5000 + 60 * (m + n)
    if n == 0:
        return 0, np.zeros(0), 0.0, 0
    status, x, obj, iters = _kernel(
        np.ascontiguousarray(A), np.ascontiguousarray(b),
        np.ascontiguousarray(is_eq.astype(np.uint8)),
        np.ascontiguousarray(c), np.ascontiguousarray(lb),
        np.ascontiguousarray(ub), maxiter)
    return int(status), x, float(obj), int(iters)
