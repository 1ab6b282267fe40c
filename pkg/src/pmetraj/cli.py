"""Command-line interface: simulate, study, waiting, merge, bench."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import _backend
from .config import _parse_number, load_config
from .csvio import emit_series_csv, emit_study_csv, emit_waiting_csv
from .harness import (
    ExperimentConfig,
    default_ladder,
    run_convergence_study,
    run_simulation,
    waiting_summary,
)
from .state import AdmissibilityError, ConfigError, SolverError

__all__ = ["main"]


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="experiment config file (key = value lines)")
    p.add_argument("--experiment", help="section name when the config holds several")
    p.add_argument("--out", help="output directory for CSV files")
    p.add_argument("--problem", choices=("smooth", "barenblatt", "waiting", "two_column"))
    p.add_argument("--case", type=int, choices=(1, 2))
    p.add_argument("--m", type=_parse_number)
    p.add_argument("--M", type=int)
    p.add_argument("--tau", type=_parse_number)
    p.add_argument("--T", type=_parse_number)
    p.add_argument("--theta", type=_parse_number)
    p.add_argument("--M2", type=int)
    p.add_argument("--snapshots", help="comma-separated snapshot times")


def _build_config(args) -> ExperimentConfig:
    overrides = {}
    for key in ("problem", "case", "m", "M", "tau", "T", "theta", "M2"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    if args.snapshots:
        overrides["snapshot_times"] = tuple(
            _parse_number(v) for v in args.snapshots.split(",") if v.strip()
        )
    if args.out:
        overrides["out_dir"] = args.out
    if args.config:
        cfg = load_config(args.config, section=args.experiment)
        return cfg.with_(**overrides) if overrides else cfg
    required = {"problem", "case", "m", "M", "tau", "T"}
    missing = required - set(overrides)
    if missing:
        raise ConfigError(
            f"without --config these flags are required: {sorted('--' + k for k in missing)}"
        )
    return ExperimentConfig(**overrides)


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_simulate(args) -> int:
    cfg = _build_config(args)
    record = run_simulation(cfg)
    out = _out_dir(cfg) / f"{cfg.problem}_case{cfg.case}_series.csv"
    emit_series_csv(record, out)
    print(f"wrote {out}")
    if record.meeting_time is not None:
        print(f"meeting time: {record.meeting_time:.17g}")
    if record.t_star is not None:
        print(f"detected waiting time: {record.t_star:.17g}")
    print(f"steps: {record.times.size - 1}, cpu: {record.cpu_seconds:.3f}s, "
          f"energy violations: {record.energy_violations}")
    return 0


def _cmd_study(args) -> int:
    cfg = _build_config(args)
    if args.ladder:
        ladder = []
        for chunk in args.ladder.split(","):
            m_txt, tau_txt = chunk.split(":")
            ladder.append((int(m_txt), _parse_number(tau_txt)))
    else:
        ladder = default_ladder(cfg.M, cfg.tau, args.levels)
    rows = run_convergence_study(cfg, ladder)
    out = _out_dir(cfg) / f"{cfg.problem}_case{cfg.case}_study.csv"
    emit_study_csv(rows, out)
    print(f"wrote {out}")
    for r in rows:
        order = "" if r.order_l2_f is None else f"{r.order_l2_f:6.3f}"
        print(f"M={r.M:<6d} tau={r.tau:<12.6g} l2(f)={r.err_l2_f:.4e} order={order} "
              f"cpu={r.cpu_s:.3f}s")
    return 0


def _cmd_waiting(args) -> int:
    cfg = _build_config(args)
    thetas = ([_parse_number(v) for v in args.thetas.split(",")]
              if args.thetas else [cfg.theta])
    rows = []
    for theta in thetas:
        summary = waiting_summary(cfg.with_(theta=theta))
        rows.append(summary)
        print(f"theta={theta:.6g}: detected t*={summary['t_star_h']:.17g} "
              f"(exact {summary['t_star_exact']:.17g})")
    out = _out_dir(cfg) / f"waiting_case{cfg.case}_summary.csv"
    emit_waiting_csv(rows, out)
    print(f"wrote {out}")
    return 0


def _cmd_merge(args) -> int:
    cfg = _build_config(args)
    if cfg.problem != "two_column":
        cfg = cfg.with_(problem="two_column")
    record = run_simulation(cfg)
    out = _out_dir(cfg) / f"two_column_case{cfg.case}_series.csv"
    emit_series_csv(record, out)
    print(f"wrote {out}")
    if record.meeting_time is None:
        print("supports did not meet before the final time")
    else:
        print(f"meeting time: {record.meeting_time:.17g}")
        print(f"merged mass relative error: {record.merged_mass_rel_error:.3e}")
    return 0


def _cmd_bench(args) -> int:
    from .benchmark import run_benchmark

    run_benchmark(sizes=[int(s) for s in args.sizes.split(",")], repeats=args.repeats)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pmetraj",
        description="Trajectory solver for the 1-D porous medium equation "
                    f"(backend: {_backend.BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one experiment and emit its series CSV")
    _add_common(p_sim)
    p_sim.set_defaults(fn=_cmd_simulate)

    p_study = sub.add_parser("study", help="run a refinement ladder and emit the study CSV")
    _add_common(p_study)
    p_study.add_argument("--ladder", help="explicit levels, e.g. 100:1/100,200:1/400")
    p_study.add_argument("--levels", type=int, default=4,
                         help="levels of the default halving/quartering ladder")
    p_study.set_defaults(fn=_cmd_study)

    p_wait = sub.add_parser("waiting", help="detect waiting times and emit the summary CSV")
    _add_common(p_wait)
    p_wait.add_argument("--thetas", help="comma-separated theta sweep")
    p_wait.set_defaults(fn=_cmd_waiting)

    p_merge = sub.add_parser("merge", help="evolve two supports through their merge")
    _add_common(p_merge)
    p_merge.set_defaults(fn=_cmd_merge)

    p_bench = sub.add_parser("bench", help="compare the compiled and pure-Python backends")
    p_bench.add_argument("--sizes", default="1000,4000,8000")
    p_bench.add_argument("--repeats", type=int, default=5)
    p_bench.set_defaults(fn=_cmd_bench)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, AdmissibilityError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
