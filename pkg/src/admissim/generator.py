"""Synthetic instance generator.

Produces a loaded hospital: a cyclic weekly MSS over the weekdays, one
home ward per discipline plus a shared overflow ward, and per-week
patient arrivals calibrated so requested OR minutes track
target_load x MSS capacity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (ALLOWED_MAX_WAIT, PERIOD_DAYS, WEEKDAYS, Instance,
                   MssSlot, PatientRecord, SurgicalDiscipline, Ward)

MAX_WAIT_PROBS = (0.08, 0.37, 0.37, 0.17, 0.01)


class GenerationError(ValueError):
    pass


def _default_los_distribution(n_disciplines: int) -> dict[int, list[float]]:
    """Truncated geometric-like pmf on 1..14 days, mean near 4, varied a
    little per discipline."""
    out = {}
    means = [3.5, 4.0, 4.5]
    for s in range(n_disciplines):
        mean = means[s % len(means)]
        p = 1.0 / mean
        weights = np.array([(1 - p) ** (l - 1) * p for l in range(1, 15)])
        out[s] = list(weights / weights.sum())
    return out


def _default_surgery_minutes(n_disciplines: int) -> dict[int, tuple[int, int]]:
    ranges = [(60, 120), (60, 90), (90, 120)]
    return {s: ranges[s % len(ranges)] for s in range(n_disciplines)}


@dataclass
class GeneratorConfig:
    horizon_weeks: int = 8
    disciplines: int = 3
    wards_per_discipline: int = 1
    beds_per_ward: tuple[int, int] = (4, 6)
    rooms: int = 2
    weekly_or_minutes_per_discipline: int = 480
    target_load: float = 1.1
    los_distribution: dict[int, list[float]] | None = None
    surgery_minutes_distribution: dict[int, tuple[int, int]] | None = None
    critical_probability: float = 0.1
    seed: int = 20240001

    def validate(self) -> None:
        if self.horizon_weeks < 1 or self.disciplines < 1 or self.rooms < 1:
            raise GenerationError("horizon, disciplines, and rooms must be >= 1")
        if self.wards_per_discipline < 1:
            raise GenerationError("wards_per_discipline must be >= 1")
        if self.beds_per_ward[0] < 1 or self.beds_per_ward[1] < self.beds_per_ward[0]:
            raise GenerationError("beds_per_ward range invalid")
        if self.target_load <= 0:
            raise GenerationError("target_load must be > 0")
        if not 0 <= self.critical_probability <= 1:
            raise GenerationError("critical_probability outside [0, 1]")
        if self.disciplines > WEEKDAYS * self.rooms:
            raise GenerationError("more disciplines than weekday OR cells; "
                                  "some discipline would get no OR time")
        if self.weekly_or_minutes_per_discipline < 1:
            raise GenerationError("weekly OR minutes must be >= 1")
        if self.los_distribution is not None:
            for s in range(self.disciplines):
                probs = self.los_distribution.get(s)
                if not probs or abs(sum(probs) - 1.0) > 1e-9 or min(probs) < 0:
                    raise GenerationError(f"LOS distribution for discipline {s} "
                                          "missing or not normalized")


def sample_max_wait(rng: np.random.Generator) -> int:
    """Maximum acceptable waiting time, days."""
    return int(rng.choice(ALLOWED_MAX_WAIT, p=MAX_WAIT_PROBS))


def _build_mss(cfg: GeneratorConfig) -> list[MssSlot]:
    """Every discipline gets the same number of OR blocks (leftover grid
    cells stay unassigned), so block sizes stay uniform and surgeries can
    tile them exactly."""
    cells = [(d, j) for d in range(1, WEEKDAYS + 1) for j in range(cfg.rooms)]
    blocks_each = len(cells) // cfg.disciplines
    if blocks_each == 0:
        raise GenerationError("more disciplines than weekday OR cells")
    per_disc: dict[int, list[tuple[int, int]]] = {s: [] for s in range(cfg.disciplines)}
    for i, cell in enumerate(cells[:blocks_each * cfg.disciplines]):
        per_disc[i % cfg.disciplines].append(cell)
    slots = []
    for s in range(cfg.disciplines):
        own = per_disc[s]
        base, extra = divmod(cfg.weekly_or_minutes_per_discipline, len(own))
        for k, (d, j) in enumerate(own):
            minutes = base + (1 if k < extra else 0)
            if minutes > 0:
                slots.append(MssSlot(discipline=s, day=d, room=j, minutes=minutes))
    return slots


def _build_wards(cfg: GeneratorConfig, rng: np.random.Generator) \
        -> tuple[list[Ward], dict[int, frozenset[int]]]:
    n_wards = cfg.disciplines * cfg.wards_per_discipline
    lo, hi = cfg.beds_per_ward
    beds = [int(rng.integers(lo, hi + 1)) for _ in range(n_wards)]
    # discipline s is at home in its own block and may overflow into the
    # first ward of the next discipline's block, so ward-change and
    # transfer policies have room to act
    compat: dict[int, set[int]] = {s: set() for s in range(cfg.disciplines)}
    for s in range(cfg.disciplines):
        block = range(s * cfg.wards_per_discipline,
                      (s + 1) * cfg.wards_per_discipline)
        compat[s].update(block)
        if cfg.disciplines > 1:
            compat[s].add(((s + 1) % cfg.disciplines) * cfg.wards_per_discipline)
    wards = []
    for w in range(n_wards):
        discs = frozenset(s for s in range(cfg.disciplines) if w in compat[s])
        wards.append(Ward(id=w, capacity_beds=beds[w],
                          compatible_disciplines=discs))
    return wards, {s: frozenset(v) for s, v in compat.items()}


def generate_instance(cfg: GeneratorConfig) -> Instance:
    """Deterministic instance for a seed; see GeneratorConfig for knobs."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    los_dist = cfg.los_distribution or _default_los_distribution(cfg.disciplines)
    u_dist = cfg.surgery_minutes_distribution or _default_surgery_minutes(
        cfg.disciplines)

    slots = _build_mss(cfg)
    wards, compat = _build_wards(cfg, rng)
    # largest OR block per discipline; longer surgeries could never be
    # placed and would sit on the waiting list forever
    max_block = {s: max((sl.minutes for sl in slots if sl.discipline == s),
                        default=0)
                 for s in range(cfg.disciplines)}

    patients: list[PatientRecord] = []
    pid = 0
    for week in range(cfg.horizon_weeks):
        arrival = week * PERIOD_DAYS
        for s in range(cfg.disciplines):
            target = cfg.target_load * cfg.weekly_or_minutes_per_discipline
            u_lo, u_hi = u_dist[s]
            probs = np.asarray(los_dist[s])
            used = 0.0
            while True:
                # surgical time booked in half-hour steps
                u = 30 * int(rng.integers(u_lo // 30, u_hi // 30 + 1))
                u = max(30, min(u, max_block[s]))
                if used + u / 2.0 > target:
                    break
                used += u
                true_los = int(rng.choice(np.arange(1, len(probs) + 1), p=probs))
                max_wait = sample_max_wait(rng)
                waited = int(rng.integers(0, max_wait // 2 + 1))
                critical = bool(rng.random() < cfg.critical_probability)
                patients.append(PatientRecord(
                    id=pid, discipline=s, true_los_days=true_los,
                    predicted_los_days=true_los,
                    due_day=arrival + max_wait, waited_days=waited,
                    max_wait_days=max_wait, urgency=360 // max_wait,
                    surgery_minutes=u, compatible_wards=compat[s],
                    critical_flag=critical))
                pid += 1

    instance = Instance(
        disciplines=[SurgicalDiscipline(id=s) for s in range(cfg.disciplines)],
        wards=wards, mss_slots=slots, patients=patients,
        horizon_weeks=cfg.horizon_weeks)
    _structural_check(instance)
    return instance


def _structural_check(instance: Instance) -> None:
    for i, d in enumerate(instance.disciplines):
        if d.id != i:
            raise GenerationError("discipline ids not dense")
    for i, w in enumerate(instance.wards):
        if w.id != i:
            raise GenerationError("ward ids not dense")
    for s in instance.mss_slots:
        if s.minutes < 0:
            raise GenerationError("negative slot minutes")
    for p in instance.patients:
        if not p.compatible_wards:
            raise GenerationError(f"patient {p.id} has no compatible ward")
        for w in p.compatible_wards:
            if p.discipline not in instance.ward(w).compatible_disciplines:
                raise GenerationError(
                    f"patient {p.id}: ward {w} incompatible with discipline")
