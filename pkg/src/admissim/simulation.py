"""Rolling-horizon simulation.

Weekly cycle: the admission schedule for the coming Monday-Sunday period
is computed on the previous Friday from predicted LOS values; each
weekday morning the true LOS of every patient operated before that day
is revealed and the active repair policy fixes any resulting bed
conflicts.  Canceled patients return to the waiting list; stays progress
over weekends without intervention.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import (ADMITTED, CANCELED, DISCHARGED, PERIOD_DAYS, SCHEDULED,
                   WAITING, WEEKDAYS, AdmissionPlan, Instance,
                   compute_occupancy)
from .prediction import ErrorModel, PredictionSeeds, predict_for_patient
from .rescheduling import POLICY_FUNCS, derive_context
from .scheduling import (SchedulingInput, candidate_pool_cap, schedule_week,
                         select_candidates)


class InvariantViolation(RuntimeError):
    """Post-repair capacity check failed: a bug, not a metric."""


@dataclass
class Stay:
    ward: int
    admit_global: int
    los_known: int
    revealed: bool
    room: int
    segment_start: int
    predicted_los: int


@dataclass
class ReplicationMetrics:
    sched_obj_sum: float = 0.0
    resched_obj_sum: float = 0.0
    waitlist_end: int = 0
    canceled: int = 0
    affected: int = 0
    occ_predicted: float = 0.0
    occ_observed: float = 0.0

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class HospitalState:
    instance: Instance
    patients: dict = field(default_factory=dict)
    plan: AdmissionPlan | None = None
    in_house: dict = field(default_factory=dict)   # pid -> Stay
    waiting: set = field(default_factory=set)
    discharged: set = field(default_factory=set)
    segments: list = field(default_factory=list)   # (ward, start, nights)
    predicted_stays: list = field(default_factory=list)
    postponed_ever: set = field(default_factory=set)
    ward_changed_ever: set = field(default_factory=set)
    transferred_ever: set = field(default_factory=set)
    canceled_ever: set = field(default_factory=set)
    predictions_drawn: set = field(default_factory=set)
    week: int = 0

    @classmethod
    def fresh(cls, instance: Instance) -> "HospitalState":
        state = cls(instance=instance)
        for p in instance.patients:
            rec = dataclasses.replace(p)
            rec.status = WAITING
            rec.transfer_count = 0
            state.patients[rec.id] = rec
            state.waiting.add(rec.id)
        return state

    @property
    def period_start(self) -> int:
        return self.week * PERIOD_DAYS


def advance_to(state: HospitalState, global_day: int) -> None:
    """Reveal surgeries done before global_day, then discharge finished
    stays.  Revelation always precedes discharge so an unrevealed short
    prediction can never drop a patient who is in fact still in a bed."""
    for pid in sorted(state.in_house):
        stay = state.in_house[pid]
        if not stay.revealed and stay.admit_global < global_day:
            stay.revealed = True
            stay.los_known = state.patients[pid].true_los_days
    for pid in sorted(state.in_house):
        stay = state.in_house[pid]
        if stay.admit_global + stay.los_known <= global_day:
            end = stay.admit_global + stay.los_known
            state.segments.append((stay.ward, stay.segment_start,
                                   end - stay.segment_start))
            del state.in_house[pid]
            state.discharged.add(pid)
            state.patients[pid].status = DISCHARGED


def reveal_los(state: HospitalState, d_star: int) -> None:
    """Reveal true LOS for everyone operated before day d* of the current
    period (prior-period patients included)."""
    if d_star < 1:
        raise ValueError("d_star must be >= 1")
    advance_to(state, state.period_start + d_star - 1)


def carry_over_week(state: HospitalState) -> SchedulingInput:
    """Scheduling input for the upcoming week.

    Still-waiting patients (including freshly canceled ones) gain 7
    waited days; carryover occupancy comes from in-house patients'
    best-known remaining stays.  Friday's operations are not yet
    revealed at planning time.
    """
    period_start = state.period_start
    advance_to(state, period_start - 3)  # the planning Friday
    for pid in sorted(state.waiting):
        rec = state.patients[pid]
        if rec.status == CANCELED:  # back on the list for the new period
            rec.status = WAITING
        if state.week > 0:
            rec.waited_days += 7

    h = np.zeros((len(state.instance.wards), PERIOD_DAYS), dtype=np.int64)
    ward_index = {w.id: i for i, w in enumerate(state.instance.wards)}
    for pid in sorted(state.in_house):
        stay = state.in_house[pid]
        last = stay.admit_global + stay.los_known - 1
        for d in range(1, PERIOD_DAYS + 1):
            t = period_start + d - 1
            if stay.admit_global <= t <= last:
                h[ward_index[stay.ward], d - 1] += 1

    visible = [state.patients[pid] for pid in sorted(state.waiting)
               if state.patients[pid].arrival_day <= period_start]
    pool = select_candidates(visible, candidate_pool_cap(state.instance))
    return SchedulingInput(instance=state.instance, candidates=pool,
                           carryover_occupancy=h, period_start=period_start)


def draw_predictions(state: HospitalState, model: ErrorModel,
                     seeds: PredictionSeeds) -> None:
    """One frozen prediction per patient, at first visibility."""
    for pid in sorted(state.waiting):
        rec = state.patients[pid]
        if rec.arrival_day <= state.period_start \
                and pid not in state.predictions_drawn:
            rec.predicted_los_days = predict_for_patient(
                rec.true_los_days, model, seeds, pid)
            state.predictions_drawn.add(pid)


def _admit_due_today(state: HospitalState, d_star: int) -> None:
    g = state.period_start + d_star - 1
    keep = []
    for a in state.plan.assignments:
        if a.day != d_star:
            keep.append(a)
            continue
        rec = state.patients[a.patient]
        state.in_house[a.patient] = Stay(
            ward=a.ward, admit_global=g, los_known=rec.predicted_los_days,
            revealed=False, room=a.room, segment_start=g,
            predicted_los=rec.predicted_los_days)
        state.predicted_stays.append((a.ward, g, rec.predicted_los_days))
        rec.status = ADMITTED
    state.plan.assignments = keep


def apply_outcome(state: HospitalState, outcome) -> None:
    g = state.period_start + outcome.d_star - 1
    for pid in sorted(outcome.in_house_wards):
        new_ward = outcome.in_house_wards[pid]
        stay = state.in_house[pid]
        if new_ward != stay.ward:
            state.segments.append((stay.ward, stay.segment_start,
                                   g - stay.segment_start))
            stay.ward = new_ward
            stay.segment_start = g
            state.patients[pid].transfer_count += 1
    state.plan.assignments = list(outcome.assignments)
    for pid in sorted(outcome.canceled):
        rec = state.patients[pid]
        rec.status = CANCELED
        state.waiting.add(pid)
        state.canceled_ever.add(pid)
    state.postponed_ever |= outcome.postponed
    state.ward_changed_ever |= outcome.ward_changed
    state.transferred_ever |= outcome.transferred


def check_post_repair(state: HospitalState, d_star: int) -> None:
    """Best-known occupancy and OR load must fit capacity on every
    remaining day of the period."""
    inst = state.instance
    period_start = state.period_start
    ward_index = {w.id: i for i, w in enumerate(inst.wards)}
    occ = np.zeros((len(inst.wards), PERIOD_DAYS), dtype=np.int64)
    for pid, stay in state.in_house.items():
        last = stay.admit_global + stay.los_known - 1
        for d in range(d_star, PERIOD_DAYS + 1):
            t = period_start + d - 1
            if stay.admit_global <= t <= last:
                occ[ward_index[stay.ward], d - 1] += 1
    for a in state.plan.assignments:
        los = state.patients[a.patient].predicted_los_days
        for d in range(max(a.day, d_star), min(PERIOD_DAYS, a.day + los - 1) + 1):
            occ[ward_index[a.ward], d - 1] += 1
    for w in inst.wards:
        for d in range(d_star, PERIOD_DAYS + 1):
            if occ[ward_index[w.id], d - 1] > w.capacity_beds:
                raise InvariantViolation(
                    f"ward {w.id} day {d}: {occ[ward_index[w.id], d - 1]} "
                    f"> {w.capacity_beds} beds after repair")
    or_load: dict[tuple[int, int, int], int] = {}
    for a in state.plan.assignments:
        p = state.patients[a.patient]
        key = (p.discipline, a.day, a.room)
        or_load[key] = or_load.get(key, 0) + p.surgery_minutes
    for (s, d, j), used in or_load.items():
        if used > inst.slot_minutes(s, d, j):
            raise InvariantViolation(
                f"OR overload: discipline {s} day {d} room {j}")


def run_replication(instance: Instance, policy: str, error_model: ErrorModel,
                    seeds: PredictionSeeds, gap: float = 0.01,
                    context_log: list | None = None,
                    check_invariants: bool = True,
                    lp_dump_dir=None) -> ReplicationMetrics:
    """Simulate one full horizon under one repair policy.

    Deterministic given (instance, seeds); the prediction streams ignore
    the policy, so paired runs across policies face identical errors.
    """
    if policy not in POLICY_FUNCS:
        raise ValueError(f"unknown policy {policy!r}")
    state = HospitalState.fresh(instance)
    metrics = ReplicationMetrics()
    policy_fn = POLICY_FUNCS[policy]

    def dump_path(phase: str, global_day: int):
        if lp_dump_dir is None:
            return None
        return Path(lp_dump_dir) / f"{phase}_{global_day}.lp"

    for week in range(instance.horizon_weeks):
        state.week = week
        draw_predictions(state, error_model, seeds)
        inp = carry_over_week(state)
        result = schedule_week(
            inp, gap=gap, dump_path=dump_path("schedule", state.period_start))
        state.plan = result.plan
        for a in result.plan.assignments:
            state.patients[a.patient].status = SCHEDULED
            state.waiting.discard(a.patient)
        metrics.sched_obj_sum += result.objective

        for d_star in range(1, WEEKDAYS + 1):
            reveal_los(state, d_star)
            ctx = derive_context(state, d_star)
            if context_log is not None:
                context_log.append(ctx)
            outcome = policy_fn(
                ctx, gap=gap,
                dump_path=dump_path(policy, state.period_start + d_star - 1))
            apply_outcome(state, outcome)
            metrics.resched_obj_sum += outcome.objective
            if check_invariants:
                check_post_repair(state, d_star)
            _admit_due_today(state, d_star)
        if state.plan.assignments:
            raise InvariantViolation("assignments left after Friday repair")

    horizon_end = instance.horizon_days
    advance_to(state, horizon_end + 1)
    segments = list(state.segments)
    for pid in sorted(state.in_house):  # still in a bed at horizon end
        stay = state.in_house[pid]
        true_end = stay.admit_global + state.patients[pid].true_los_days
        segments.append((stay.ward, stay.segment_start,
                         max(0, true_end - stay.segment_start)))

    n_total = len(instance.patients)
    n_terminal = len(state.waiting) + len(state.in_house) + len(state.discharged)
    if n_terminal != n_total:
        raise InvariantViolation(
            f"patient conservation broken: {n_terminal} != {n_total}")

    metrics.waitlist_end = len(state.waiting)
    metrics.canceled = len(state.canceled_ever)
    affected = (state.postponed_ever | state.ward_changed_ever
                | state.transferred_ever) - state.canceled_ever
    metrics.affected = len(affected)
    window = (0, horizon_end)
    metrics.occ_predicted = compute_occupancy(
        instance, state.predicted_stays, window).rate
    metrics.occ_observed = compute_occupancy(instance, segments, window).rate
    return metrics
