"""Daily repair MILPs: the four rescheduling policies.

On repair day d* the remaining days of the period are re-optimized.
In-house patients are pinned to day d* with zero surgery minutes and
their remaining nights as LOS; only non-critical, never-transferred ones
may change ward (policies T and C).  Not-yet-admitted patients may move
day (P, C), ward (CW, T, C), and OR (all policies, unpenalized).

Deviation indicators count only placed patients: a postponed-and-kept
patient costs 1; a canceled one costs exactly M = |pending|, the uniform
cancellation weight that makes any repair preferable to a cancellation.
Outcome objectives are recomputed from the chosen placements, so they
are exact small integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import PERIOD_DAYS, WEEKDAYS, Assignment, Instance
from .solver import IntegerProgram, Solution, solve
from .solver.program import EQ, GE, LE, INFEASIBLE

POLICIES = ("P", "CW", "T", "C")


@dataclass(frozen=True)
class PendingPatient:
    """Planned but not yet admitted on repair day d*."""
    id: int
    discipline: int
    d_hat: int
    w_hat: int
    j_hat: int
    los: int  # predicted, not yet revealed
    surgery_minutes: int
    compatible_wards: frozenset[int]


@dataclass(frozen=True)
class InHousePatient:
    """Admitted earlier in the current period, still in a bed."""
    id: int
    discipline: int
    ward: int
    j_hat: int
    remaining_los: int  # nights from d* on, true LOS (revealed)
    transferable: bool
    compatible_wards: frozenset[int] = frozenset()


@dataclass
class ReschedulingContext:
    instance: Instance
    period_start: int
    d_star: int
    pending: list[PendingPatient]
    in_house: list[InHousePatient]
    fixed_occupancy: np.ndarray  # wards x 7, prior-period patients

    @property
    def cancellation_weight(self) -> int:
        # |P_hat(d*)| - |P_hat(d*)^H|
        return len(self.pending)


@dataclass
class RescheduleOutcome:
    policy: str
    d_star: int
    assignments: list[Assignment]          # placed pending patients
    in_house_wards: dict[int, int]         # final ward per in-house patient
    postponed: set[int]
    ward_changed: set[int]
    transferred: set[int]
    canceled: set[int]
    objective: float
    solution: Solution = field(repr=False, default=None)


def derive_context(state, d_star: int) -> ReschedulingContext:
    """Snapshot the repair problem on day d* from simulation state.

    `state` needs: instance, plan (AdmissionPlan), in_house mapping of
    patient id -> stay with (ward, admit_global, los_known, room), and
    patients mapping id -> PatientRecord.
    """
    if not 1 <= d_star <= PERIOD_DAYS:
        raise ValueError(f"d_star {d_star} outside the period")
    if d_star > WEEKDAYS:
        raise ValueError(f"d_star {d_star} is not a weekday")
    inst = state.instance
    plan = state.plan
    g = plan.period_start + d_star - 1

    pending = []
    for a in sorted(plan.assignments, key=lambda a: a.patient):
        if a.day < d_star:
            raise AssertionError(
                f"stale assignment for patient {a.patient} on day {a.day}")
        p = state.patients[a.patient]
        pending.append(PendingPatient(
            id=p.id, discipline=p.discipline, d_hat=a.day, w_hat=a.ward,
            j_hat=a.room, los=p.predicted_los_days,
            surgery_minutes=p.surgery_minutes,
            compatible_wards=p.compatible_wards))

    in_house = []
    ward_index = {w.id: i for i, w in enumerate(inst.wards)}
    fixed = np.zeros((len(inst.wards), PERIOD_DAYS), dtype=np.int64)
    for pid in sorted(state.in_house):
        stay = state.in_house[pid]
        remaining = stay.admit_global + stay.los_known - g
        if remaining <= 0:
            continue
        if stay.admit_global >= plan.period_start:
            p = state.patients[pid]
            in_house.append(InHousePatient(
                id=pid, discipline=p.discipline, ward=stay.ward,
                j_hat=stay.room, remaining_los=int(remaining),
                transferable=(not p.critical_flag and p.transfer_count == 0),
                compatible_wards=p.compatible_wards))
        else:
            # prior-period patient: immovable occupancy
            last = stay.admit_global + stay.los_known - 1
            for d in range(1, PERIOD_DAYS + 1):
                t = plan.period_start + d - 1
                if stay.admit_global <= t <= last:
                    fixed[ward_index[stay.ward], d - 1] += 1
    for w in inst.wards:
        for d in range(d_star, PERIOD_DAYS + 1):
            if fixed[ward_index[w.id], d - 1] > w.capacity_beds:
                raise AssertionError(
                    f"prior-period occupancy exceeds beds in ward {w.id}")
    return ReschedulingContext(instance=inst, period_start=plan.period_start,
                               d_star=d_star, pending=pending,
                               in_house=in_house, fixed_occupancy=fixed)


def _xkey(p: int, w: int, d: int, j: int) -> str:
    return f"x[{p:04d},{w:02d},{d},{j:02d}]"


def _build_policy_model(ctx: ReschedulingContext, allow_postpone: bool,
                        allow_ward_change: bool, allow_transfer: bool):
    inst = ctx.instance
    ip = IntegerProgram()
    M = float(ctx.cancellation_weight)
    d_star = ctx.d_star

    slot_q: dict[tuple[int, int, int], int] = {}
    for s in inst.mss_slots:
        if s.minutes > 0 and s.day >= d_star:
            slot_q[(s.discipline, s.day, s.room)] = s.minutes

    # var bookkeeping: entries[pid] = [(key, w, d, j), ...]
    entries: dict[int, list[tuple[str, int, int, int]]] = {}
    obj: dict[str, float] = {}

    for p in ctx.pending:
        days = range(p.d_hat, PERIOD_DAYS + 1) if allow_postpone else (p.d_hat,)
        wards = sorted(p.compatible_wards) if allow_ward_change else (p.w_hat,)
        plist = []
        for w in wards:
            for d in days:
                for j in inst.rooms:
                    if (p.discipline, d, j) in slot_q:
                        key = ip.add_binary(_xkey(p.id, w, d, j))
                        plist.append((key, w, d, j))
        entries[p.id] = plist

    # in-house variables: ward choice only for transferable ones under T/C
    for q in ctx.in_house:
        if q.transferable and allow_transfer and q.compatible_wards:
            patient_wards = sorted(q.compatible_wards)
        else:
            patient_wards = [q.ward]
        plist = []
        for w in patient_wards:
            key = ip.add_binary(_xkey(q.id, w, d_star, q.j_hat))
            plist.append((key, w, d_star, q.j_hat))
        entries[q.id] = plist

    # indicators
    for p in ctx.pending:
        zk = ip.add_binary(f"z[{p.id:04d}]")
        obj[zk] = M
        ip.add_constraint({**{key: 1.0 for key, *_ in entries[p.id]}, zk: 1.0},
                          GE, 1.0)
        if allow_postpone:
            moved = {key: 1.0 for key, w, d, j in entries[p.id] if d > p.d_hat}
            if moved:
                yk = ip.add_binary(f"y[{p.id:04d}]")
                obj[yk] = 1.0
                ip.add_constraint({**moved, yk: -1.0}, LE, 0.0)
        if allow_ward_change:
            moved = {key: 1.0 for key, w, d, j in entries[p.id] if w != p.w_hat}
            if moved:
                vk = ip.add_binary(f"v[{p.id:04d}]")
                obj[vk] = 1.0
                ip.add_constraint({**moved, vk: -1.0}, LE, 0.0)

    for q in ctx.in_house:
        ip.add_constraint({key: 1.0 for key, *_ in entries[q.id]}, EQ, 1.0)
        if allow_transfer and q.transferable:
            moved = {key: 1.0 for key, w, d, j in entries[q.id] if w != q.ward}
            if moved:
                ck = ip.add_binary(f"chi[{q.id:04d}]")
                obj[ck] = 1.0
                ip.add_constraint({**moved, ck: -1.0}, LE, 0.0)

    # at most one slot per pending patient
    for p in ctx.pending:
        if entries[p.id]:
            ip.add_constraint({key: 1.0 for key, *_ in entries[p.id]}, LE, 1.0)

    # OR capacity on remaining days
    for (s, d, j), q_min in sorted(slot_q.items()):
        coeffs = {}
        for p in ctx.pending:
            if p.discipline != s or p.surgery_minutes == 0:
                continue
            for key, w, dd, jj in entries[p.id]:
                if dd == d and jj == j:
                    coeffs[key] = float(p.surgery_minutes)
        if coeffs:
            ip.add_constraint(coeffs, LE, float(q_min))

    # bed capacity on remaining days
    ward_index = {w.id: i for i, w in enumerate(inst.wards)}
    los = {p.id: p.los for p in ctx.pending}
    los.update({q.id: q.remaining_los for q in ctx.in_house})
    for w in inst.wards:
        for d in range(d_star, PERIOD_DAYS + 1):
            coeffs = {}
            for pid, plist in entries.items():
                l = los[pid]
                for key, ww, dd, jj in plist:
                    if ww == w.id and dd <= d <= dd + l - 1:
                        coeffs[key] = 1.0
            rhs = float(w.capacity_beds
                        - ctx.fixed_occupancy[ward_index[w.id], d - 1])
            if coeffs:
                ip.add_constraint(coeffs, LE, rhs)

    ip.set_objective(obj)
    return ip, entries


def _solve_policy(ctx: ReschedulingContext, gap: float, policy: str,
                  allow_postpone: bool, allow_ward_change: bool,
                  allow_transfer: bool, time_limit: float | None = None,
                  dump_path=None) -> RescheduleOutcome:
    ip, entries = _build_policy_model(ctx, allow_postpone, allow_ward_change,
                                      allow_transfer)
    if dump_path is not None:
        with open(dump_path, "w", encoding="utf-8") as fh:
            fh.write(ip.to_lp_text())
    sol = solve(ip, gap=gap, time_limit=time_limit)
    if sol.status == INFEASIBLE:
        raise AssertionError(
            "repair model infeasible; cancel-all is always feasible")

    assignments = []
    postponed, ward_changed, transferred, canceled = set(), set(), set(), set()
    for p in ctx.pending:
        chosen = None
        for key, w, d, j in entries[p.id]:
            if round(sol.values[key]) == 1:
                chosen = (w, d, j)
                break
        if chosen is None:
            canceled.add(p.id)
            continue
        w, d, j = chosen
        assignments.append(Assignment(patient=p.id, ward=w, day=d, room=j))
        if d > p.d_hat:
            postponed.add(p.id)
        if w != p.w_hat:
            ward_changed.add(p.id)
    in_house_wards = {}
    for q in ctx.in_house:
        chosen = None
        for key, w, d, j in entries[q.id]:
            if round(sol.values[key]) == 1:
                chosen = w
                break
        if chosen is None:
            raise AssertionError(f"in-house patient {q.id} left unplaced")
        in_house_wards[q.id] = chosen
        if chosen != q.ward:
            transferred.add(q.id)

    objective = float(len(postponed) + len(ward_changed) + len(transferred)
                      + ctx.cancellation_weight * len(canceled))
    # placements with minimal indicators can only improve on the incumbent
    if objective > sol.objective + 1e-6:
        raise AssertionError("recomputed outcome objective exceeds incumbent")
    return RescheduleOutcome(policy=policy, d_star=ctx.d_star,
                             assignments=assignments,
                             in_house_wards=in_house_wards,
                             postponed=postponed, ward_changed=ward_changed,
                             transferred=transferred, canceled=canceled,
                             objective=objective, solution=sol)


def reschedule_postpone(ctx, gap: float = 0.01, **kw) -> RescheduleOutcome:
    """Policy P: admissions may shift to a later day in the same ward."""
    return _solve_policy(ctx, gap, "P", True, False, False, **kw)


def reschedule_change_ward(ctx, gap: float = 0.01, **kw) -> RescheduleOutcome:
    """Policy CW: admissions keep their day but may use another ward."""
    return _solve_policy(ctx, gap, "CW", False, True, False, **kw)


def reschedule_transfer(ctx, gap: float = 0.01, **kw) -> RescheduleOutcome:
    """Policy T: CW moves plus one-time transfers of in-house patients."""
    return _solve_policy(ctx, gap, "T", False, True, True, **kw)


def reschedule_combined(ctx, gap: float = 0.01, **kw) -> RescheduleOutcome:
    """Policy C: postponements, ward changes, and transfers together."""
    return _solve_policy(ctx, gap, "C", True, True, True, **kw)


POLICY_FUNCS = {
    "P": reschedule_postpone,
    "CW": reschedule_change_ward,
    "T": reschedule_transfer,
    "C": reschedule_combined,
}
