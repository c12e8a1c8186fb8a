"""Command-line front end: planning, simulation, exports, and the service."""
from __future__ import annotations

import argparse
import importlib.resources
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, SystemConfig, load_config
from .costs import build_cost_tables, cm_only_rate
from .scheduler import SystemState, run_study, step_plan, _om_plan_at


def _resolve_config(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    bundled = importlib.resources.files("nextpm") / "fixtures" / name
    if bundled.is_file():
        return Path(str(bundled))
    candidate = importlib.resources.files("nextpm") / "fixtures" / f"{name}.json"
    if candidate.is_file():
        return Path(str(candidate))
    raise ConfigError([f"config {name!r} not found (no such file or bundled fixture)"])


def _load(args) -> SystemConfig:
    config = load_config(_resolve_config(args.config))
    mc = config.mc
    if args.seed is not None:
        mc = replace(mc, seed=args.seed)
    if args.reps is not None:
        mc = replace(mc, replications=args.reps)
    if mc is not config.mc:
        config = SystemConfig(horizon=config.horizon, lam=config.lam,
                              window=config.window, components=config.components,
                              calendar=config.calendar, mc=mc)
    return config


def _load_state(config: SystemConfig, args) -> SystemState:
    if getattr(args, "state", None):
        path = Path(args.state) / "state.json"
        if path.exists():
            with open(path) as fh:
                raw = json.load(fh)
            st = raw["state"]
            return SystemState(s=st["s"],
                               last_maintenance=tuple(st["last_maintenance"]),
                               r=st["r"], horizon=config.horizon,
                               window=config.window)
    return SystemState.fresh(config)


def cmd_plan(args) -> int:
    config = _load(args)
    state = _load_state(config, args)
    tables, plan = step_plan(state, config)
    months = " ".join(f"{cid}->{m}" for cid, m in
                      zip(plan.component_ids, plan.assignment))
    if plan.tau > tables.r:
        print(f"no PM this window (defer to month {plan.tau})")
    else:
        print(f"next PM at month {plan.tau}: components "
              f"{{{', '.join(str(c) for c in plan.set_P)}}}")
    print(f"objective {plan.objective:.4f} /month   assignment {months}")
    print(f"window [{tables.s + 1}, {tables.r + 1}]  "
          f"mc reps={config.mc.replications} seed={config.mc.seed}")
    if plan.marginal:
        print("near-zero benefit (within 1 stderr):",
              ", ".join(f"component {c} at {t}" for c, t in plan.marginal))
    return 0


def cmd_om(args) -> int:
    config = _load(args)
    state = _load_state(config, args)
    if args.failed not in config.component_ids:
        print(f"unknown component {args.failed}", file=sys.stderr)
        return 2
    if args.time <= state.s:
        print(f"failure time must exceed the current month {state.s}",
              file=sys.stderr)
        return 2
    import math
    u = max(math.floor(args.time), state.s)
    row = config.component_ids.index(args.failed)
    om = _om_plan_at(state, config, row, u, config.mc)
    joiners = ", ".join(str(c) for c in om.set_O) or "none"
    print(f"CM of component {args.failed} at month {u + 1}; "
          f"opportunistic PM: {joiners}")
    print(f"objective {om.objective:.4f}   mc reps={config.mc.replications} "
          f"seed={config.mc.seed}")
    return 0


def cmd_simulate(args) -> int:
    # here --reps means study trajectories, not MC cells; keep mc settings
    study_reps = args.reps or 100
    args.reps = None
    config = _load(args)
    strategies = args.strategy or ["nextpm", "cm-only"]
    report = run_study(config, strategies, replications=study_reps,
                       seed=config.mc.seed,
                       table_replications=args.table_reps)
    for st in report.stats:
        lo, hi = st.ci95
        line = (f"{st.strategy:8s} rate {st.mean:.4f} +- {st.stderr:.4f} "
                f"(95% CI [{lo:.4f}, {hi:.4f}])")
        if st.planning_objective is not None:
            line += f"  planning objective {st.planning_objective:.4f}"
        print(line)
    if "cm-only" in strategies:
        for st in report.stats:
            if st.strategy != "cm-only":
                print(f"{st.strategy} saving vs cm-only: "
                      f"{report.saving_pct(st.strategy):.1f}%")
        print(f"renewal-theory cm-only rate: "
              f"{cm_only_rate(config.components, config.calendar):.4f}")
    if args.out:
        report.to_csv(args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_tables(args) -> int:
    config = _load(args)
    state = _load_state(config, args)
    tables = build_cost_tables(
        config.components, config.calendar, config.lam, state.s,
        state.last_maintenance, state.r, config.horizon, config.mc)
    out = args.out or "tables.csv"
    tables.to_csv(out)
    print(f"wrote {out}: {len(config.components)} components x "
          f"[{state.s + 1}, {state.r + 1}]")
    return 0


def cmd_pmspic_compare(args) -> int:
    from .pmspic import comparison_rows, comparison_to_csv

    config = _load(args)
    values = set(config.calendar.values)
    if len(values) != 1:
        print("pmspic-compare requires a constant set-up cost calendar",
              file=sys.stderr)
        return 2
    d = values.pop()
    rows = comparison_rows(config.components, d, config.lam, config.horizon,
                           config.window, config.mc,
                           time_limit=args.time_limit)
    for row in rows:
        months = " ".join("x" if m < 0 else str(m) for m in row.first_months)
        extra = "" if row.optimal else (
            f"  [best effort, lower bound {row.lower_bound:.1f}]")
        print(f"{row.strategy:8s} first PM {months}  monthly "
              f"{row.monthly_cost:.4f}  solve {row.solve_seconds:.3f}s{extra}")
    if args.out:
        comparison_to_csv(rows, config.component_ids, args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    config = _load(args)
    app = create_app(config, state_dir=args.state, reset=args.reset)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nextpm",
        description="preventive-maintenance planning for multi-component "
                    "systems with Weibull lifetimes")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, state=True):
        p.add_argument("--config", required=True,
                       help="config JSON path or bundled fixture name")
        p.add_argument("--seed", type=int, help="override the MC seed")
        p.add_argument("--reps", type=int,
                       help="override replications (MC cells or study runs)")
        if state:
            p.add_argument("--state", help="state directory (persisted loop)")

    p = sub.add_parser("plan", help="solve the next-PM problem")
    common(p)
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("om", help="opportunistic-maintenance advice for a failure")
    common(p)
    p.add_argument("--failed", type=int, required=True, help="failed component id")
    p.add_argument("--time", type=float, required=True,
                   help="continuous failure time in months")
    p.set_defaults(fn=cmd_om)

    p = sub.add_parser("simulate", help="lifecycle study over [0, T]")
    common(p, state=False)
    p.add_argument("--strategy", action="append",
                   choices=["nextpm", "cm-only"],
                   help="strategy to simulate (repeatable; default both)")
    p.add_argument("--table-reps", type=int, default=2000,
                   help="MC replications per in-loop table build")
    p.add_argument("--out", help="write the report CSV here")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("tables", help="export expected-cost tables as CSV")
    common(p)
    p.add_argument("--out", help="output CSV path (default tables.csv)")
    p.set_defaults(fn=cmd_tables)

    p = sub.add_parser("pmspic-compare",
                       help="first-PM comparison against the interval-cost model")
    common(p, state=False)
    p.add_argument("--time-limit", type=float, default=10.0,
                   help="seconds for the best-effort whole-horizon solve")
    p.add_argument("--out", help="write comparison CSV here")
    p.set_defaults(fn=cmd_pmspic_compare)

    p = sub.add_parser("serve", help="run the HTTP planning service")
    common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--reset", action="store_true",
                   help="discard any persisted state")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
