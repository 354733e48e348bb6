"""Command line interface: gen / run / agg."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import load_instance, save_instance
from .generator import GeneratorConfig, generate_instance
from .sweep import DEFAULT_POLICIES, SweepConfig, aggregate, run_sweep


def parse_value_list(text: str) -> list[float]:
    """Comma list ("-3,-1,0") or inclusive range with step 1 ("-3..3")."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = float(lo), float(hi)
        out, v = [], lo
        while v <= hi + 1e-9:
            out.append(v)
            v += 1.0
        return out
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _add_generator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--horizon-weeks", type=int, default=8)
    p.add_argument("--disciplines", type=int, default=3)
    p.add_argument("--wards-per-discipline", type=int, default=1)
    p.add_argument("--beds-per-ward", type=int, nargs=2, default=(4, 6),
                   metavar=("LO", "HI"))
    p.add_argument("--rooms", type=int, default=2)
    p.add_argument("--weekly-or-minutes", type=int, default=480,
                   help="OR minutes per discipline per week")
    p.add_argument("--target-load", type=float, default=1.1)
    p.add_argument("--critical-probability", type=float, default=0.1)


def _config_from_args(args, seed: int) -> GeneratorConfig:
    return GeneratorConfig(
        horizon_weeks=args.horizon_weeks, disciplines=args.disciplines,
        wards_per_discipline=args.wards_per_discipline,
        beds_per_ward=tuple(args.beds_per_ward), rooms=args.rooms,
        weekly_or_minutes_per_discipline=args.weekly_or_minutes,
        target_load=args.target_load,
        critical_probability=args.critical_probability, seed=seed)


def cmd_gen(args) -> int:
    cfg = _config_from_args(args, args.seed)
    instance = generate_instance(cfg)
    save_instance(instance, args.out)
    print(f"wrote {args.out}: {len(instance.patients)} patients, "
          f"{len(instance.wards)} wards, {instance.horizon_weeks} weeks")
    return 0


def cmd_run(args) -> int:
    instances = {}
    if args.instances:
        for path in args.instances:
            instances[Path(path).stem] = load_instance(path)
    else:
        out_dir = Path(args.out)
        inst_dir = out_dir / "instances"
        inst_dir.mkdir(parents=True, exist_ok=True)
        for i in range(args.num_instances):
            cfg = _config_from_args(args, args.gen_seed + i)
            inst = generate_instance(cfg)
            name = f"instance_{i:02d}"
            save_instance(inst, inst_dir / f"{name}.json")
            instances[name] = inst

    cfg = SweepConfig(
        instances=instances,
        policies=args.policies,
        mu_values=parse_value_list(args.mu),
        sigma_values=parse_value_list(args.sigma),
        repetitions=args.reps,
        gap=args.gap,
        master_seed=args.seed,
        distribution=args.distribution,
        out_dir=Path(args.out),
        workers=args.workers,
        lp_dump_dir=args.dump_lp)
    paths = run_sweep(cfg)
    print(f"wrote {paths['results']} ({cfg.runs_per_policy()} rows per "
          f"policy x {len(cfg.policies)} policies)")
    return 0


def cmd_agg(args) -> int:
    agg = aggregate(args.results, args.out)
    print(f"wrote {args.out}: {len(agg)} aggregate rows")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="admissim",
        description="Admission scheduling under LOS prediction error")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic instance")
    _add_generator_flags(g)
    g.add_argument("--seed", type=int, default=20240001)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_gen)

    r = sub.add_parser("run", help="run an experiment sweep")
    r.add_argument("--instances", nargs="*", default=None,
                   help="instance JSON files (default: generate)")
    r.add_argument("--num-instances", type=int, default=5)
    r.add_argument("--gen-seed", type=int, default=20240001)
    _add_generator_flags(r)
    r.add_argument("--policies", nargs="+", default=list(DEFAULT_POLICIES),
                   choices=["P", "CW", "T", "C"])
    r.add_argument("--mu", default="-3..3",
                   help="error means: comma list or lo..hi range")
    r.add_argument("--sigma", default="0..5",
                   help="error std devs: comma list or lo..hi range")
    r.add_argument("--reps", type=int, default=5)
    r.add_argument("--gap", type=float, default=0.01)
    r.add_argument("--seed", type=int, default=20240917,
                   help="master seed for the error streams")
    r.add_argument("--distribution", default="normal",
                   choices=["normal", "dirac", "triangular", "cauchy"])
    r.add_argument("--out", default="results")
    r.add_argument("--workers", type=int, default=0,
                   help="worker processes (0 = all cores)")
    r.add_argument("--dump-lp", default=None, metavar="DIR",
                   help="write each model as <phase>_<day>.lp (meant for "
                        "single-cell grids; later runs overwrite)")
    r.set_defaults(fn=cmd_run)

    a = sub.add_parser("agg", help="aggregate a results CSV")
    a.add_argument("--results", required=True)
    a.add_argument("--out", required=True)
    a.set_defaults(fn=cmd_agg)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
