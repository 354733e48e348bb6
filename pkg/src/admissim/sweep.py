"""Experiment sweep: instances x policies x error grid x repetitions.

One CSV row per replication, a manifest capturing the configuration, and
an aggregation step producing per-(policy, mu, sigma) means.  Child
seeds derive from hashing the run coordinates, so adding scenarios never
perturbs existing ones; row content is deterministic given the master
seed (walltime column aside).
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .core import Instance, instance_from_json, instance_to_json
from .prediction import ErrorModel, PredictionSeeds
from .simulation import run_replication
from .solver import backend_name

CSV_COLUMNS = ["instance_id", "policy", "mu", "sigma", "rep",
               "sched_obj_sum", "resched_obj_sum", "waitlist_end",
               "canceled", "affected", "occ_predicted", "occ_observed",
               "walltime_s"]

METRIC_COLUMNS = CSV_COLUMNS[5:-1] + ["walltime_s"]

DEFAULT_MU = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]
DEFAULT_SIGMA = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
DEFAULT_POLICIES = ["P", "CW", "T", "C"]


@dataclass
class SweepConfig:
    instances: dict[str, Instance]
    policies: list[str] = field(default_factory=lambda: list(DEFAULT_POLICIES))
    mu_values: list[float] = field(default_factory=lambda: list(DEFAULT_MU))
    sigma_values: list[float] = field(default_factory=lambda: list(DEFAULT_SIGMA))
    repetitions: int = 5
    gap: float = 0.01
    master_seed: int = 20240917
    distribution: str = "normal"
    out_dir: Path = Path("results")
    workers: int = 0  # 0 -> cpu count
    lp_dump_dir: Path | None = None  # inspection hatch; use single-cell grids

    def runs_per_policy(self) -> int:
        return (len(self.instances) * len(self.mu_values)
                * len(self.sigma_values) * self.repetitions)


_WORKER_INSTANCES: dict[str, Instance] = {}


def _worker_init(instance_jsons: dict[str, str]) -> None:
    _WORKER_INSTANCES.clear()
    for key, text in instance_jsons.items():
        _WORKER_INSTANCES[key] = instance_from_json(text)


def _one_run(task) -> dict:
    (instance_id, policy, mu, sigma, rep, gap, master_seed, distribution,
     lp_dump_dir) = task
    instance = _WORKER_INSTANCES[instance_id]
    model = ErrorModel(mean=mu, std_dev=sigma, distribution=distribution)
    seeds = PredictionSeeds(master_seed=master_seed, instance_id=instance_id,
                            mu=mu, sigma=sigma, repetition=rep)
    t0 = time.perf_counter()
    metrics = run_replication(instance, policy, model, seeds, gap=gap,
                              lp_dump_dir=lp_dump_dir)
    wall = time.perf_counter() - t0
    row = {"instance_id": instance_id, "policy": policy, "mu": mu,
           "sigma": sigma, "rep": rep, **metrics.as_dict(),
           "walltime_s": round(wall, 4)}
    return row


def run_sweep(cfg: SweepConfig) -> dict[str, Path]:
    """Execute every cell of the grid; returns paths of written files."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results_path = out / "results.csv"
    manifest_path = out / "manifest.json"
    try:
        with open(results_path, "w", encoding="utf-8") as fh:
            fh.write("")
    except OSError as exc:
        raise OSError(f"output directory not writable: {exc}") from exc

    lp_dump = None
    if cfg.lp_dump_dir is not None:
        lp_dump = Path(cfg.lp_dump_dir)
        lp_dump.mkdir(parents=True, exist_ok=True)
        lp_dump = str(lp_dump)
    tasks = []
    for instance_id in sorted(cfg.instances):
        for policy in cfg.policies:
            for mu in cfg.mu_values:
                for sigma in cfg.sigma_values:
                    for rep in range(cfg.repetitions):
                        tasks.append((instance_id, policy, mu, sigma, rep,
                                      cfg.gap, cfg.master_seed,
                                      cfg.distribution, lp_dump))

    instance_jsons = {key: instance_to_json(inst)
                      for key, inst in cfg.instances.items()}
    workers = cfg.workers if cfg.workers > 0 else (os.cpu_count() or 1)
    rows: list[dict] = []
    if workers == 1:
        _worker_init(instance_jsons)
        for task in tasks:
            rows.append(_one_run(task))
    else:
        with ProcessPoolExecutor(max_workers=workers,
                                 initializer=_worker_init,
                                 initargs=(instance_jsons,)) as pool:
            for row in pool.map(_one_run, tasks, chunksize=4):
                rows.append(row)

    rows.sort(key=lambda r: (r["instance_id"], r["policy"], r["mu"],
                             r["sigma"], r["rep"]))
    with open(results_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)

    manifest = {
        "package_version": __version__,
        "lp_backend": backend_name(),
        "numpy_version": np.__version__,
        "config": {
            "policies": cfg.policies,
            "mu_values": cfg.mu_values,
            "sigma_values": cfg.sigma_values,
            "repetitions": cfg.repetitions,
            "gap": cfg.gap,
            "master_seed": cfg.master_seed,
            "distribution": cfg.distribution,
            "instances": {key: len(inst.patients)
                          for key, inst in sorted(cfg.instances.items())},
        },
        "rows": len(rows),
        "rows_per_policy": cfg.runs_per_policy(),
    }
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
    return {"results": results_path, "manifest": manifest_path}


def aggregate(results_path, out_path=None) -> pd.DataFrame:
    """Means over instances x repetitions per (policy, mu, sigma) cell."""
    df = pd.read_csv(results_path)
    missing = [c for c in CSV_COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"results file lacks columns: {missing}")
    expected = df["instance_id"].nunique() * df["rep"].nunique()
    counts = df.groupby(["policy", "mu", "sigma"]).size()
    gaps = counts[counts != expected]
    if len(gaps):
        raise ValueError(
            "incomplete sweep; missing cells for: "
            + ", ".join(f"{idx} has {n}/{expected} rows"
                        for idx, n in gaps.items()))
    agg = (df.groupby(["policy", "mu", "sigma"], as_index=False)
             [METRIC_COLUMNS].mean())
    agg["n"] = expected
    if out_path is not None:
        agg.to_csv(out_path, index=False)
    return agg
