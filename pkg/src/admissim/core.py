"""Domain model: disciplines, wards, MSS, patients, plans, validation.

Day conventions used throughout:
  * global days are 0-based integers, day 0 = first Monday of the horizon
  * each planning period is one week, days 1..7 (Monday..Sunday)
  * surgeries only on days with OR time (weekdays); beds are occupied
    every day of a stay
  * a patient admitted on day d with LOS l occupies a bed on days
    d .. d+l-1 (admission night included)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

PERIOD_DAYS = 7
WEEKDAYS = 5

# patient lifecycle states
WAITING = "waiting"
SCHEDULED = "scheduled"
ADMITTED = "admitted"
DISCHARGED = "discharged"
CANCELED = "canceled_this_period"

ALLOWED_MAX_WAIT = (8, 30, 60, 180, 360)

LOS_PREDICTED = "predicted"
LOS_TRUE = "true"


class StructuralError(ValueError):
    """A plan or instance references an unknown id (distinct from a
    capacity violation, which is reported, not raised)."""


@dataclass(frozen=True)
class SurgicalDiscipline:
    id: int


@dataclass(frozen=True)
class Ward:
    id: int
    capacity_beds: int
    compatible_disciplines: frozenset[int]

    def __post_init__(self):
        if self.capacity_beds < 1:
            raise ValueError(f"ward {self.id}: capacity_beds must be >= 1")
        if not self.compatible_disciplines:
            raise ValueError(f"ward {self.id}: no compatible disciplines")


@dataclass(frozen=True)
class MssSlot:
    """OR time (minutes) reserved for one discipline on (day, room)."""

    discipline: int
    day: int  # 1..7 within the period, cyclic week over week
    room: int
    minutes: int

    def __post_init__(self):
        if self.minutes < 0:
            raise ValueError("slot minutes must be >= 0")


@dataclass
class PatientRecord:
    id: int
    discipline: int
    true_los_days: int
    predicted_los_days: int
    due_day: int  # global day index
    waited_days: int
    max_wait_days: int
    urgency: float  # 360 / max_wait_days
    surgery_minutes: int
    compatible_wards: frozenset[int]
    critical_flag: bool
    transfer_count: int = 0
    status: str = WAITING

    def __post_init__(self):
        if self.true_los_days < 1:
            raise ValueError(f"patient {self.id}: true LOS must be >= 1")
        if self.max_wait_days not in ALLOWED_MAX_WAIT:
            raise ValueError(f"patient {self.id}: max_wait {self.max_wait_days}")
        if self.urgency * self.max_wait_days != 360:
            raise ValueError(f"patient {self.id}: urgency != 360/max_wait")
        if not self.compatible_wards:
            raise ValueError(f"patient {self.id}: no compatible wards")

    @property
    def arrival_day(self) -> int:
        # due date was fixed at arrival + max_wait, so arrival is recoverable
        return self.due_day - self.max_wait_days


@dataclass(frozen=True)
class Assignment:
    patient: int
    ward: int
    day: int  # 1..7 within the period
    room: int


@dataclass
class AdmissionPlan:
    period_start: int  # global day index of day 1
    period_length: int
    assignments: list[Assignment]
    carryover_occupancy: np.ndarray  # wards x period_length, ints

    def assignment_for(self, patient_id: int) -> Assignment | None:
        for a in self.assignments:
            if a.patient == patient_id:
                return a
        return None


@dataclass
class OccupancyReport:
    counts: np.ndarray  # wards x days
    occupied_bed_days: int
    available_bed_days: int

    @property
    def rate(self) -> float:
        if self.available_bed_days == 0:
            return 0.0
        return self.occupied_bed_days / self.available_bed_days


@dataclass
class Violation:
    kind: str  # duplicate_assignment | or_capacity | bed_capacity
    detail: str
    ward: int | None = None
    day: int | None = None
    excess: float = 0.0


@dataclass
class Instance:
    disciplines: list[SurgicalDiscipline]
    wards: list[Ward]
    mss_slots: list[MssSlot]
    patients: list[PatientRecord]
    horizon_weeks: int

    def __post_init__(self):
        self._patients_by_id = {p.id: p for p in self.patients}
        self._wards_by_id = {w.id: w for w in self.wards}
        self._slot_minutes = {(s.discipline, s.day, s.room): s.minutes
                              for s in self.mss_slots}
        self._rooms = sorted({s.room for s in self.mss_slots})

    @property
    def horizon_days(self) -> int:
        return self.horizon_weeks * PERIOD_DAYS

    @property
    def rooms(self) -> list[int]:
        return self._rooms

    def patient(self, pid: int) -> PatientRecord:
        try:
            return self._patients_by_id[pid]
        except KeyError:
            raise StructuralError(f"unknown patient id {pid}") from None

    def ward(self, wid: int) -> Ward:
        try:
            return self._wards_by_id[wid]
        except KeyError:
            raise StructuralError(f"unknown ward id {wid}") from None

    def slot_minutes(self, discipline: int, day: int, room: int) -> int:
        return self._slot_minutes.get((discipline, day, room), 0)

    def slots_for_day(self, day: int) -> list[MssSlot]:
        return [s for s in self.mss_slots if s.day == day]


def validate_plan(instance: Instance, plan: AdmissionPlan,
                  los_source: str = LOS_PREDICTED) -> list[Violation]:
    """Check a plan against OR and bed capacity under the chosen LOS lens.

    Returns every violation found (not just the first).  Unknown patient,
    ward, or room ids raise StructuralError instead.
    """
    if los_source not in (LOS_PREDICTED, LOS_TRUE):
        raise ValueError(f"los_source must be predicted|true, got {los_source}")
    violations: list[Violation] = []

    seen: set[int] = set()
    for a in plan.assignments:
        instance.patient(a.patient)
        instance.ward(a.ward)
        if a.room not in instance._rooms:
            raise StructuralError(f"unknown room id {a.room}")
        if not (1 <= a.day <= plan.period_length):
            raise StructuralError(
                f"patient {a.patient}: day {a.day} outside period")
        if a.patient in seen:
            violations.append(Violation(
                kind="duplicate_assignment",
                detail=f"patient {a.patient} assigned more than once"))
        seen.add(a.patient)

    # OR capacity per (discipline, day, room)
    load: dict[tuple[int, int, int], int] = {}
    for a in plan.assignments:
        p = instance.patient(a.patient)
        key = (p.discipline, a.day, a.room)
        load[key] = load.get(key, 0) + p.surgery_minutes
    for (s, d, j), used in sorted(load.items()):
        q = instance.slot_minutes(s, d, j)
        if used > q:
            violations.append(Violation(
                kind="or_capacity", day=d,
                detail=f"discipline {s} day {d} room {j}: {used} > {q} min",
                excess=used - q))

    # bed capacity per (ward, day), carryover included
    n_wards = len(instance.wards)
    ward_index = {w.id: i for i, w in enumerate(instance.wards)}
    occ = np.zeros((n_wards, plan.period_length), dtype=np.int64)
    for a in plan.assignments:
        p = instance.patient(a.patient)
        los = p.predicted_los_days if los_source == LOS_PREDICTED else p.true_los_days
        lo = a.day
        hi = min(plan.period_length, a.day + los - 1)
        if hi >= lo:
            occ[ward_index[a.ward], lo - 1:hi] += 1
    occ += plan.carryover_occupancy
    for w in instance.wards:
        wi = ward_index[w.id]
        for d in range(1, plan.period_length + 1):
            if occ[wi, d - 1] > w.capacity_beds:
                violations.append(Violation(
                    kind="bed_capacity", ward=w.id, day=d,
                    detail=(f"ward {w.id} day {d}: {occ[wi, d - 1]} beds "
                            f"used, {w.capacity_beds} available"),
                    excess=int(occ[wi, d - 1] - w.capacity_beds)))
    return violations


def compute_occupancy(instance: Instance,
                      realized_stays: list[tuple[int, int, int]],
                      day_range: tuple[int, int]) -> OccupancyReport:
    """Bed occupancy over [start, end) global days.

    realized_stays: (ward id, admission global day, nights) triples; a
    transferred patient contributes one triple per ward segment.
    """
    start, end = day_range
    n_days = max(0, end - start)
    n_wards = len(instance.wards)
    ward_index = {w.id: i for i, w in enumerate(instance.wards)}
    counts = np.zeros((n_wards, n_days), dtype=np.int64)
    for ward, admit, nights in realized_stays:
        if ward not in ward_index:
            raise StructuralError(f"unknown ward id {ward}")
        lo = max(start, admit)
        hi = min(end, admit + nights)
        if hi > lo:
            counts[ward_index[ward], lo - start:hi - start] += 1
    occupied = int(counts.sum())
    available = sum(w.capacity_beds for w in instance.wards) * n_days
    return OccupancyReport(counts=counts, occupied_bed_days=occupied,
                           available_bed_days=available)


# ---------------------------------------------------------------------------
# instance (de)serialization: one JSON document, field names match the types

def instance_to_json(instance: Instance) -> str:
    doc = {
        "horizon_weeks": instance.horizon_weeks,
        "disciplines": [asdict(d) for d in instance.disciplines],
        "wards": [{"id": w.id, "capacity_beds": w.capacity_beds,
                   "compatible_disciplines": sorted(w.compatible_disciplines)}
                  for w in instance.wards],
        "mss_slots": [asdict(s) for s in instance.mss_slots],
        "patients": [{**asdict(p),
                      "compatible_wards": sorted(p.compatible_wards)}
                     for p in instance.patients],
    }
    return json.dumps(doc, indent=1, sort_keys=True)


def instance_from_json(text: str) -> Instance:
    doc = json.loads(text)
    return Instance(
        disciplines=[SurgicalDiscipline(**d) for d in doc["disciplines"]],
        wards=[Ward(id=w["id"], capacity_beds=w["capacity_beds"],
                    compatible_disciplines=frozenset(w["compatible_disciplines"]))
               for w in doc["wards"]],
        mss_slots=[MssSlot(**s) for s in doc["mss_slots"]],
        patients=[PatientRecord(**{**p, "compatible_wards":
                                   frozenset(p["compatible_wards"])})
                  for p in doc["patients"]],
        horizon_weeks=doc["horizon_weeks"],
    )


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_json(fh.read())


def save_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(instance_to_json(instance))
