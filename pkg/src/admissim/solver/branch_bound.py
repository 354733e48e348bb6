"""Best-bound branch and bound over the LP relaxation.

Single-threaded and deterministic: most-fractional branching with ties
broken by lowest variable key lexicographically, node selection by best
bound with FIFO tie-break.  Incumbents come mostly from a dive-and-fix
primal heuristic (largest fractional fixed to 1, re-solving after each
fix) run at the root and periodically at later nodes.  The relative gap
follows the usual MIP convention (objective - bound) / max(1, |obj|).
"""

from __future__ import annotations

import heapq
import math
import time

import numpy as np

from .backend import lp_solve
from .program import (INFEASIBLE, OPTIMAL_WITHIN_GAP, CompiledProgram,
                      IntegerProgram, Solution, SolverTimeout)

INT_TOL = 1e-6
FEAS_TOL = 1e-6
HEURISTIC_PERIOD = 40  # run the dive heuristic at every k-th node pop


def solve(program: IntegerProgram, gap: float = 0.01,
          time_limit: float | None = None) -> Solution:
    """Minimize the program to the requested relative optimality gap.

    Returns a Solution with status "infeasible" when no assignment
    satisfies the constraints; raises SolverTimeout when the time limit
    expires before the gap is proven.
    """
    if gap < 0:
        raise ValueError("gap must be >= 0")
    comp = program.compile()
    n = len(comp.keys)
    nb = comp.num_binaries
    if n == 0:
        return Solution(values={}, objective=0.0, bound=0.0, gap=0.0,
                        status=OPTIMAL_WITHIN_GAP, nodes=0)

    # ceil-tightening is valid when the objective lives on binaries only
    # and every coefficient is integral
    obj_integral = (np.all(comp.c[nb:] == 0.0)
                    and np.all(np.abs(comp.c[:nb] - np.round(comp.c[:nb])) < 1e-12))

    # branching tie-break: lexicographic rank of the binary keys
    order = sorted(range(nb), key=lambda i: comp.keys[i])
    rank = np.empty(nb, dtype=np.int64)
    for pos, col in enumerate(order):
        rank[col] = pos

    def tighten(obj: float) -> float:
        return math.ceil(obj - 1e-6) if obj_integral else obj

    start = time.monotonic()
    counter = 0
    heap: list[tuple[float, int, np.ndarray, np.ndarray]] = []
    heapq.heappush(heap, (-math.inf, counter, comp.lb.copy(), comp.ub.copy()))

    incumbent: np.ndarray | None = None
    inc_obj = math.inf
    glb = -math.inf
    nodes = 0
    pops = 0

    def consider(xc: np.ndarray | None) -> None:
        nonlocal incumbent, inc_obj
        if xc is None:
            return
        cobj = float(comp.c @ xc)
        if cobj < inc_obj - 1e-12:
            incumbent = xc
            inc_obj = cobj

    while heap:
        nbound, _, lbn, ubn = heapq.heappop(heap)
        glb = nbound
        if incumbent is not None:
            if inc_obj - nbound <= gap * max(1.0, abs(inc_obj)) + 1e-12:
                break
            if nbound >= inc_obj - 1e-9:
                glb = inc_obj
                break
        if time_limit is not None and time.monotonic() - start > time_limit:
            raise SolverTimeout(
                f"time limit {time_limit}s hit after {nodes} nodes"
                + ("" if incumbent is None else
                   f" (incumbent {inc_obj:.6g} did not meet gap {gap})"))

        status, x, obj, _ = lp_solve(comp.A, comp.b, comp.is_eq, comp.c,
                                     lbn, ubn)
        nodes += 1
        if status == 1:
            continue
        if status == 2:
            raise ValueError("LP relaxation is unbounded")
        if status == 3:
            raise RuntimeError("simplex iteration limit reached")
        bound = tighten(obj)
        if bound >= inc_obj - 1e-9:
            continue

        fracs = np.abs(x[:nb] - np.round(x[:nb])) if nb else np.zeros(0)
        if nb == 0 or fracs.max(initial=0.0) <= INT_TOL:
            consider(_cleanup(comp, x))
            continue

        if pops % HEURISTIC_PERIOD == 0:
            hx, hn = _dive_heuristic(comp, x, lbn, ubn, rank,
                                     inc_obj if incumbent is not None else None)
            nodes += hn
            consider(hx)
            if incumbent is not None and inc_obj - bound <= \
                    gap * max(1.0, abs(inc_obj)) + 1e-12:
                # optimum within gap of this subtree's own bound; the heap
                # top can only confirm at the next pop
                pops += 1
                counter += 1
                heapq.heappush(heap, (bound, counter, lbn, ubn))
                continue
        pops += 1

        # most fractional, ties by lexicographic key rank
        dist = 0.5 - np.abs(x[:nb] - np.floor(x[:nb]) - 0.5)
        cand = np.flatnonzero(dist >= dist.max() - 1e-9)
        j = int(cand[np.argmin(rank[cand])])

        lb0, ub0 = lbn.copy(), ubn.copy()
        ub0[j] = 0.0
        counter += 1
        heapq.heappush(heap, (bound, counter, lb0, ub0))
        lb1, ub1 = lbn, ubn
        lb1[j] = 1.0
        counter += 1
        heapq.heappush(heap, (bound, counter, lb1, ub1))

    if incumbent is None:
        # covers both LP-infeasible roots and exhausted trees with no
        # integral point; never return a partial assignment
        return Solution(values={}, objective=math.inf, bound=math.inf,
                        gap=0.0, status=INFEASIBLE, nodes=nodes)

    if not heap and glb < inc_obj:
        glb = inc_obj
    glb = min(glb, inc_obj)
    _verify(comp, incumbent)
    values = {k: (float(round(incumbent[i])) if i < nb else float(incumbent[i]))
              for i, k in enumerate(comp.keys)}
    rel_gap = max(0.0, (inc_obj - glb) / max(1.0, abs(inc_obj)))
    return Solution(values=values, objective=float(inc_obj), bound=float(glb),
                    gap=float(rel_gap), status=OPTIMAL_WITHIN_GAP, nodes=nodes)


def _dive_heuristic(comp: CompiledProgram, x0: np.ndarray, lbn: np.ndarray,
                    ubn: np.ndarray, rank: np.ndarray,
                    cutoff: float | None) -> tuple[np.ndarray | None, int]:
    """Dive-and-fix: repeatedly pin the largest fractional binary to 1 and
    re-solve, falling back to 0 when that direction is infeasible.  The
    re-solve after every fix lets the LP re-route displaced mass, which
    single-pass rounding cannot do.  Returns (point or None, LP count)."""
    nb = comp.num_binaries
    lb, ub = lbn.copy(), ubn.copy()
    x = x0
    solves = 0
    for _ in range(2 * nb + 4):
        fracs = np.abs(x[:nb] - np.round(x[:nb]))
        if fracs.max(initial=0.0) <= INT_TOL:
            xc = _cleanup(comp, x)
            return (xc if _feasible(comp, xc) else None), solves
        frac_cols = np.flatnonzero(fracs > INT_TOL)
        j = int(frac_cols[np.lexsort((rank[frac_cols], -x[frac_cols]))[0]])
        lb[j] = 1.0
        ub[j] = 1.0
        status, x2, obj2, _ = lp_solve(comp.A, comp.b, comp.is_eq, comp.c,
                                       lb, ub)
        solves += 1
        if status != 0:
            lb[j] = 0.0
            ub[j] = 0.0
            status, x2, obj2, _ = lp_solve(comp.A, comp.b, comp.is_eq,
                                           comp.c, lb, ub)
            solves += 1
            if status != 0:
                return None, solves
        if cutoff is not None and obj2 >= cutoff - 1e-9:
            return None, solves  # dive can no longer beat the incumbent
        x = x2
    return None, solves


def _cleanup(comp: CompiledProgram, x: np.ndarray) -> np.ndarray:
    """Round binaries; snap continuous vars to their constraint-implied
    minima when the program structure allows (single continuous var per
    row, lower-bounding rows only, non-negative objective coefficient).
    Falls back to the LP values otherwise."""
    nb = comp.num_binaries
    n = len(comp.keys)
    xc = x.copy()
    xc[:nb] = np.round(xc[:nb])
    if nb == n:
        return xc
    implied = _implied_continuous(comp, xc[:nb])
    if implied is None:
        return xc
    cand = xc.copy()
    cand[nb:] = implied
    if _feasible(comp, cand):
        return cand
    return xc


def _implied_continuous(comp: CompiledProgram,
                        binvals: np.ndarray) -> np.ndarray | None:
    nb = comp.num_binaries
    if np.any(comp.c[nb:] < 0):
        return None
    vals = comp.lb[nb:].copy()
    for i in range(comp.A.shape[0]):
        row = comp.A[i]
        conts = np.flatnonzero(row[nb:] != 0.0)
        if len(conts) == 0:
            continue
        if len(conts) > 1 or comp.is_eq[i]:
            return None
        k = conts[0]
        a = row[nb + k]
        if a >= 0:
            # an upper-bounding row would invalidate the minima snap
            return None
        # row: sum(bin terms) + a*y <= b with a < 0  =>  y >= (sum - b)/(-a)
        s = float(row[:nb] @ binvals)
        vals[k] = max(vals[k], (s - comp.b[i]) / (-a))
    return vals


def _feasible(comp: CompiledProgram, x: np.ndarray) -> bool:
    lhs = comp.A @ x
    if np.any(lhs > comp.b + FEAS_TOL):
        return False
    if np.any(np.abs(lhs[comp.is_eq] - comp.b[comp.is_eq]) > FEAS_TOL):
        return False
    return True


def _verify(comp: CompiledProgram, x: np.ndarray) -> None:
    if not _feasible(comp, x):
        raise RuntimeError("incumbent failed the feasibility re-check")
