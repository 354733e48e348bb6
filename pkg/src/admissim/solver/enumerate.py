"""Exhaustive enumeration oracle for small programs.

Only the structural binaries are enumerated; indicator-style binaries and
continuous trackers that appear solely in lower-bounding rows (with a
non-negative objective coefficient) are derived per assignment as the
smallest value those rows allow.  This keeps the oracle independent of
the LP/branch-and-bound path while covering every model family built in
this package.
"""

from __future__ import annotations

import numpy as np

from .program import (GE, INFEASIBLE, LE, OPTIMAL_WITHIN_GAP,
                      IntegerProgram, Solution)

ROW_TOL = 1e-9
CHUNK = 4096


class TooManyBinariesError(ValueError):
    pass


class UnsupportedProgramError(ValueError):
    pass


def enumerate_optimal(program: IntegerProgram,
                      max_binaries: int = 20) -> Solution:
    """Provably optimal solution by brute force over free binaries."""
    rows = program.rows()
    obj = program.objective_coeffs()
    binaries = program.binary_keys
    continuous = program.continuous_keys

    defining, implied = _classify(rows, obj, set(binaries), set(continuous))
    free = [k for k in binaries if k not in implied]
    if len(free) > max_binaries:
        raise TooManyBinariesError(
            f"{len(free)} free binaries exceed the enumeration cap "
            f"{max_binaries}")
    bad_cont = [k for k in continuous if k not in implied]
    if bad_cont:
        raise UnsupportedProgramError(
            f"continuous vars {bad_cont} are not implied by lower-bounding "
            "rows; enumeration cannot set them")

    col = {k: i for i, k in enumerate(free)}
    k = len(free)

    general_rows = []
    for coeffs, sense, rhs in rows:
        if any(key in implied for key in coeffs):
            continue
        vec = np.zeros(k)
        for key, val in coeffs.items():
            vec[col[key]] += val
        general_rows.append((vec, sense, rhs))

    # defining rows normalized to: var >= alpha + beta . x
    bound_terms: dict[str, list[tuple[float, np.ndarray]]] = {v: [] for v in implied}
    for var, coeffs, sense, rhs in defining:
        a = coeffs[var]
        beta = np.zeros(k)
        for key, val in coeffs.items():
            if key == var:
                continue
            beta[col[key]] += val
        if sense == GE:  # a*var + beta.x >= rhs, a > 0
            bound_terms[var].append((rhs / a, -beta / a))
        else:  # a*var + beta.x <= rhs, a < 0
            bound_terms[var].append((rhs / a, -beta / a))

    best_obj = np.inf
    best_x: np.ndarray | None = None
    best_implied: dict[str, float] | None = None
    c_free = np.array([obj.get(key, 0.0) for key in free])

    total = 1 << k
    for lo in range(0, total, CHUNK):
        hi = min(lo + CHUNK, total)
        idx = np.arange(lo, hi, dtype=np.uint64)
        X = ((idx[:, None] >> np.arange(k, dtype=np.uint64)) & 1).astype(
            np.float64) if k else np.zeros((hi - lo, 0))

        ok = np.ones(hi - lo, dtype=bool)
        for vec, sense, rhs in general_rows:
            lhs = X @ vec
            if sense == LE:
                ok &= lhs <= rhs + ROW_TOL
            elif sense == GE:
                ok &= lhs >= rhs - ROW_TOL
            else:
                ok &= np.abs(lhs - rhs) <= ROW_TOL
        if not ok.any():
            continue

        vals = {}
        objs = X @ c_free
        for var in implied:
            low = np.zeros(hi - lo)
            for alpha, beta in bound_terms[var]:
                low = np.maximum(low, alpha + X @ beta)
            if var in program.binary_keys:
                forced = np.where(low > ROW_TOL, 1.0, 0.0)
                ok &= low <= 1.0 + ROW_TOL
                low = forced
            vals[var] = low
            objs = objs + obj.get(var, 0.0) * low
        objs = np.where(ok, objs, np.inf)
        i = int(np.argmin(objs))
        if objs[i] < best_obj - 1e-12:
            best_obj = float(objs[i])
            best_x = X[i].copy()
            best_implied = {var: float(vals[var][i]) for var in implied}

    if best_x is None:
        return Solution(values={}, objective=np.inf, bound=np.inf, gap=0.0,
                        status=INFEASIBLE)
    values = {key: float(best_x[i]) for i, key in enumerate(free)}
    values.update(best_implied or {})
    return Solution(values=values, objective=best_obj, bound=best_obj,
                    gap=0.0, status=OPTIMAL_WITHIN_GAP)


def _classify(rows, obj, binaries: set[str], continuous: set[str]):
    """Split rows into defining rows (var, coeffs, sense, rhs) and find the
    implied variable set."""
    occurrences: dict[str, list[int]] = {}
    for i, (coeffs, _, _) in enumerate(rows):
        for key in coeffs:
            occurrences.setdefault(key, []).append(i)

    def lower_bounding(var, coeffs, sense):
        a = coeffs[var]
        return (sense == GE and a > 0) or (sense == LE and a < 0)

    # candidates: every occurrence is a lower-bounding row, objective >= 0
    implied = set()
    for var in list(binaries) + list(continuous):
        if obj.get(var, 0.0) < 0:
            continue
        occ = occurrences.get(var, [])
        if var in continuous and not occ:
            implied.add(var)  # free continuous at its lower bound 0
            continue
        if occ and all(lower_bounding(var, rows[i][0], rows[i][1])
                       for i in occ):
            implied.add(var)

    # a defining row may hold one implied var plus free vars only; on a
    # clash, demote implied binaries first (enumerating them stays exact),
    # and only give up continuous vars when they clash with each other
    changed = True
    while changed:
        changed = False
        for var in sorted(implied):
            if var not in implied:
                continue
            for i in occurrences.get(var, []):
                others = [key for key in rows[i][0]
                          if key != var and key in implied]
                if not others:
                    continue
                group = others + [var]
                bins = [key for key in group if key in binaries]
                if bins:
                    for key in bins:
                        implied.discard(key)
                else:
                    for key in group:
                        implied.discard(key)
                changed = True
                break

    defining = []
    for var in implied:
        for i in occurrences.get(var, []):
            coeffs, sense, rhs = rows[i]
            defining.append((var, coeffs, sense, rhs))
    return defining, implied
