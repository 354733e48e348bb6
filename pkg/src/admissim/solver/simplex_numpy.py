"""Bounded-variable two-phase primal simplex, pure-numpy fallback path.

Dense tableau over [structural | slack | artificial] columns.  The numba
kernel in simplex_numba.py implements the same pivot rules; both paths
must pick identical entering/leaving candidates so results stay
reproducible regardless of backend.

Status codes: 0 optimal, 1 infeasible, 2 unbounded, 3 iteration limit.
"""

from __future__ import annotations

import numpy as np

PIV_TOL = 1e-9
OPT_TOL = 1e-9
FEAS_TOL = 1e-7
TIE_TOL = 1e-9
DEGEN_LIMIT = 2000


def lp_solve(A, b, is_eq, c, lb, ub, maxiter=0):
    m, n = A.shape
    if maxiter <= 0:
        maxiter = 5000 + 60 * (m + n)
    if n == 0:
        return 0, np.zeros(0), 0.0, 0

    N = n + 2 * m
    T = np.zeros((m, N))
    T[:, :n] = A
    lo = np.zeros(N)
    hi = np.zeros(N)
    lo[:n] = lb
    hi[:n] = ub
    xval = np.zeros(N)
    xval[:n] = lb
    beta = np.zeros(m)
    basis = np.zeros(m, dtype=np.int64)
    vstat = np.zeros(N, dtype=np.int8)  # 0 at-lb, 1 at-ub, 2 basic

    resid = b - A @ lb
    art_used = np.zeros(m, dtype=bool)
    for i in range(m):
        T[i, n + i] = 1.0  # slack column
        hi[n + i] = 0.0 if is_eq[i] else np.inf
        slack_ok = abs(resid[i]) <= FEAS_TOL if is_eq[i] else resid[i] >= -FEAS_TOL
        if slack_ok:
            basis[i] = n + i
            vstat[n + i] = 2
            beta[i] = resid[i]
        else:
            sign = 1.0 if resid[i] > 0 else -1.0
            T[i, n + m + i] = sign
            if sign < 0:  # scale row so the basic artificial column reads 1
                T[i, :] *= -1.0
            hi[n + m + i] = np.inf
            basis[i] = n + m + i
            vstat[n + m + i] = 2
            beta[i] = abs(resid[i])
            art_used[i] = True

    cost = np.zeros(N)
    cost[n + m:] = np.where(art_used, 1.0, 0.0)
    d = cost - cost[basis] @ T

    iters = 0
    phase = 1 if art_used.any() else 2
    if phase == 2:
        cost = np.zeros(N)
        cost[:n] = c
        d = cost - cost[basis] @ T

    fixed = hi - lo <= 1e-12
    bland = False
    degen_run = 0

    while True:
        if iters >= maxiter:
            return 3, np.zeros(n), 0.0, iters
        # -- pricing
        score = np.where(vstat == 0, -d, np.where(vstat == 1, d, -np.inf))
        score[fixed] = -np.inf
        if bland:
            elig = score > OPT_TOL
            j = int(np.argmax(elig)) if elig.any() else -1
        else:
            j = int(np.argmax(score))
            if score[j] <= OPT_TOL:
                j = -1
        if j < 0:
            # phase optimum
            if phase == 1:
                art_cols = basis >= n + m
                p1 = beta[art_cols].sum() if art_cols.any() else 0.0
                if p1 > FEAS_TOL:
                    return 1, np.zeros(n), 0.0, iters
                hi[n + m:] = 0.0
                fixed = hi - lo <= 1e-12
                cost = np.zeros(N)
                cost[:n] = c
                d = cost - cost[basis] @ T
                phase = 2
                bland = False
                degen_run = 0
                continue
            break

        dirn = 1.0 if vstat[j] == 0 else -1.0
        w = T[:, j].copy()
        g = dirn * w

        # -- ratio test: row limits
        limits = np.full(m, np.inf)
        to_ub = np.zeros(m, dtype=bool)
        dec = g > PIV_TOL
        limits[dec] = (beta[dec] - lo[basis[dec]]) / g[dec]
        inc = g < -PIV_TOL
        hib = hi[basis[inc]]
        with np.errstate(invalid="ignore"):
            li = np.where(np.isfinite(hib), (hib - beta[inc]) / (-g[inc]), np.inf)
        limits[inc] = li
        to_ub[inc] = True
        limits = np.maximum(limits, 0.0)

        span = hi[j] - lo[j]
        tmin = limits.min() if m else np.inf
        if span <= tmin + TIE_TOL:
            # bound flip (or unbounded)
            if not np.isfinite(span):
                return 2, np.zeros(n), 0.0, iters
            beta -= dirn * span * w
            vstat[j] = 1 - vstat[j]
            xval[j] = hi[j] if vstat[j] == 1 else lo[j]
            iters += 1
            degen_run = degen_run + 1 if span <= 1e-10 else 0
            if degen_run > DEGEN_LIMIT:
                bland = True
            continue
        cand = np.flatnonzero(limits <= tmin + TIE_TOL)
        r = int(cand[np.argmin(basis[cand])])
        t = max(limits[r], 0.0)

        enter_val = (lo[j] if dirn > 0 else hi[j]) + dirn * t
        beta -= dirn * t * w
        leaving = basis[r]
        if to_ub[r]:
            vstat[leaving] = 1
            xval[leaving] = hi[leaving]
        else:
            vstat[leaving] = 0
            xval[leaving] = lo[leaving]
        beta[r] = enter_val
        basis[r] = j
        vstat[j] = 2

        piv = T[r, j]
        T[r] /= piv
        colj = T[:, j].copy()
        colj[r] = 0.0
        T -= np.outer(colj, T[r])
        d -= d[j] * T[r]

        iters += 1
        degen_run = degen_run + 1 if t <= 1e-10 else 0
        if degen_run > DEGEN_LIMIT:
            bland = True

    x = np.array(xval[:n])
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = beta[i]
    x = np.minimum(np.maximum(x, lb), ub)
    return 0, x, float(c @ x), iters
