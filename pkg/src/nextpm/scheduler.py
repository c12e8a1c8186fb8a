"""Rescheduling loop over the system lifespan.

Repeatedly plans the next PM for the current window; if a component fails
first, repairs it at the start of the next month together with any
opportunistic maintenance the two-month model recommends, then replans.
Also provides the repair-on-failure-only baseline and a paired-seed study
harness comparing the two.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .config import SystemConfig
from .costs import CostTables, McSettings, build_cost_tables
from .lifetime import ComponentSpec, sample_life
from .solver import (NextOmProblem, NextPmProblem, OmPlan, PmPlan,
                     solve_next_om, solve_next_pm)
from .streams import derive_seed, substream


@dataclass(frozen=True)
class SystemState:
    s: int                     # current month
    last_maintenance: tuple    # t_j per component, component order of the config
    r: int                     # end of the current planning window
    horizon: int               # T
    window: int                # constant r - s carried between iterations

    def __post_init__(self):
        if not all(0 <= t_j <= self.s for t_j in self.last_maintenance):
            raise ValueError(f"last-maintenance times {self.last_maintenance} "
                             f"outside [0, s={self.s}]")
        if not self.s <= self.r <= self.horizon:
            raise ValueError(f"need s <= r <= T, got s={self.s}, r={self.r}, "
                             f"T={self.horizon}")

    @classmethod
    def fresh(cls, config: SystemConfig) -> "SystemState":
        return cls(s=0, last_maintenance=(0,) * len(config.components),
                   r=min(config.window, config.horizon), horizon=config.horizon,
                   window=config.window)


@dataclass(frozen=True)
class MaintenanceEvent:
    time: int                  # month the work is performed
    kind: str                  # "cm" (possibly with OM riders) or "pm"
    cm_component: int | None   # id repaired correctively, None for pure PM
    pm_components: tuple       # ids renewed preventively at this occasion
    setup_cost: float
    component_cost: float      # b for the CM component plus c per PM/OM

    @property
    def cost(self) -> float:
        return self.setup_cost + self.component_cost

    def to_dict(self) -> dict:
        return {"time": self.time, "kind": self.kind,
                "cm_component": self.cm_component,
                "pm_components": list(self.pm_components),
                "setup_cost": self.setup_cost,
                "component_cost": self.component_cost,
                "cost": self.cost}


@dataclass(frozen=True)
class LifecycleResult:
    strategy: str
    seed: int
    events: tuple
    total_cost: float
    horizon: int
    first_objective: float | None = None   # objective of the initial plan

    @property
    def monthly_rate(self) -> float:
        return self.total_cost / self.horizon if self.horizon else 0.0

    def to_dict(self) -> dict:
        return {"strategy": self.strategy, "seed": self.seed,
                "total_cost": self.total_cost, "monthly_rate": self.monthly_rate,
                "horizon": self.horizon, "first_objective": self.first_objective,
                "events": [e.to_dict() for e in self.events]}


class RandomFailureTrace:
    """Physical failure times: each component's next failure is drawn once at
    renewal and stays fixed until the component is actually renewed."""

    def __init__(self, components, rng: np.random.Generator):
        self.components = list(components)
        self.rng = rng
        self.next_failure = [sample_life(spec, rng) for spec in self.components]

    def earliest_failure(self, bound: float):
        best = None
        for row, ft in enumerate(self.next_failure):
            if ft <= bound and (best is None or ft < self.next_failure[best]):
                best = row
        if best is None:
            return None
        return best, self.next_failure[best]

    def renew(self, row: int, time: float) -> None:
        self.next_failure[row] = time + sample_life(self.components[row], self.rng)


class FixedFailureTrace:
    """Deterministic trace for tests: per-component queues of lifetimes,
    consumed at each renewal.  Running out of draws is an error."""

    def __init__(self, lifetimes_per_component):
        self.queues = [list(q) for q in lifetimes_per_component]
        self.next_failure = [self._draw(row, 0.0) for row in range(len(self.queues))]

    def _draw(self, row: int, time: float) -> float:
        if not self.queues[row]:
            raise IndexError(f"failure trace exhausted for component row {row}")
        return time + self.queues[row].pop(0)

    def earliest_failure(self, bound: float):
        best = None
        for row, ft in enumerate(self.next_failure):
            if ft <= bound and (best is None or ft < self.next_failure[best]):
                best = row
        if best is None:
            return None
        return best, self.next_failure[best]

    def renew(self, row: int, time: float) -> None:
        self.next_failure[row] = self._draw(row, time)


def step_plan(state: SystemState, config: SystemConfig,
              settings: McSettings | None = None):
    """Build the window's cost tables and solve the next-PM problem.

    Returns (tables, plan)."""
    settings = settings or config.mc
    tables = build_cost_tables(config.components, config.calendar, config.lam,
                               state.s, state.last_maintenance, state.r,
                               config.horizon, settings)
    plan = solve_next_pm(NextPmProblem.from_tables(tables, config.calendar))
    return tables, plan


def _om_plan_at(state: SystemState, config: SystemConfig, failed_row: int,
                u: int, settings: McSettings) -> OmPlan:
    tables = build_cost_tables(config.components, config.calendar, config.lam,
                               u, state.last_maintenance, u + 1,
                               config.horizon, settings)
    problem = NextOmProblem.from_tables(tables, config.calendar,
                                        failed=config.component_ids[failed_row])
    return solve_next_om(problem)


def advance(state: SystemState, plan: PmPlan, failure_trace,
            config: SystemConfig, settings: McSettings | None = None):
    """One iteration of the rescheduling loop body.

    If a failure hits before the planned PM month, repair it at the start of
    the next month together with the recommended opportunistic renewals;
    otherwise carry out the planned PM.  Returns (new state, events)."""
    settings = settings or config.mc
    T = config.horizon
    events: list[MaintenanceEvent] = []
    failure = failure_trace.earliest_failure(bound=float(plan.tau))
    if failure is not None:
        row, u_cont = failure
        # failures already past due (same-month pile-ups) are repaired now
        u = max(math.floor(u_cont), state.s)
        om = _om_plan_at(state, config, row, u, settings)
        time = u + 1
        renew_rows = [row] + [config.component_ids.index(j) for j in om.set_O]
        cm_spec = config.components[row]
        component_cost = cm_spec.cm_cost + sum(
            config.spec_of(j).pm_cost for j in om.set_O)
        events.append(MaintenanceEvent(
            time=time, kind="cm", cm_component=cm_spec.id,
            pm_components=om.set_O,
            setup_cost=config.calendar.value(time),
            component_cost=component_cost))
        new_last = list(state.last_maintenance)
        for rr in sorted(renew_rows):
            new_last[rr] = time
            failure_trace.renew(rr, float(time))
        new_state = replace(state, s=time, r=min(time + state.r - state.s, T),
                            last_maintenance=tuple(new_last))
    else:
        tau = plan.tau
        new_last = list(state.last_maintenance)
        if plan.set_P:
            component_cost = sum(config.spec_of(j).pm_cost for j in plan.set_P)
            events.append(MaintenanceEvent(
                time=tau, kind="pm", cm_component=None,
                pm_components=plan.set_P,
                setup_cost=config.calendar.value(tau),
                component_cost=component_cost))
            for j in plan.set_P:
                rr = config.component_ids.index(j)
                new_last[rr] = tau
            for j in plan.set_P:
                failure_trace.renew(config.component_ids.index(j), float(tau))
        new_state = replace(state, s=tau, r=min(tau + state.r - state.s, T),
                            last_maintenance=tuple(new_last))
    return new_state, events


def run_lifecycle(config: SystemConfig, strategy: str, seed: int,
                  table_replications: int | None = None) -> LifecycleResult:
    """Simulate one trajectory over [0, T] under the given strategy.

    ``table_replications`` overrides the per-cell Monte Carlo budget of the
    in-loop table rebuilds (studies use a reduced budget; the planning
    quality degrades gracefully with table noise)."""
    if strategy not in ("nextpm", "cm-only"):
        raise ValueError(f"unknown strategy {strategy!r}")
    T = config.horizon
    events: list[MaintenanceEvent] = []
    first_objective = None
    if T > 0:
        trace = RandomFailureTrace(config.components, substream(seed, "failures"))
        if strategy == "cm-only":
            events = _run_cm_only(config, trace)
        else:
            reps = table_replications or config.mc.replications
            state = SystemState.fresh(config)
            while True:
                settings = McSettings(replications=reps,
                                      seed=derive_seed(seed, "tables", state.s))
                _, plan = step_plan(state, config, settings)
                if first_objective is None:
                    first_objective = plan.objective
                if plan.tau >= T:
                    break
                state, evs = advance(state, plan, trace, config, settings)
                events.extend(evs)
    total = sum(e.cost for e in events)
    return LifecycleResult(strategy=strategy, seed=seed, events=tuple(events),
                           total_cost=total, horizon=T,
                           first_objective=first_objective)


def _run_cm_only(config: SystemConfig, trace) -> list:
    """Repair every failure at the start of the following month; failures
    repaired in the same month share one set-up charge."""
    T = config.horizon
    events: list[MaintenanceEvent] = []
    while True:
        failure = trace.earliest_failure(bound=float(T))
        if failure is None:
            break
        row, u_cont = failure
        time = math.floor(u_cont) + 1
        rows = [rr for rr, ft in enumerate(trace.next_failure)
                if ft <= T and math.floor(ft) + 1 == time]
        component_cost = sum(config.components[rr].cm_cost for rr in rows)
        for rr in rows:
            # one event per repaired component, set-up on the first only
            events.append(MaintenanceEvent(
                time=time, kind="cm", cm_component=config.components[rr].id,
                pm_components=(),
                setup_cost=config.calendar.value(time) if rr == rows[0] else 0.0,
                component_cost=config.components[rr].cm_cost))
            trace.renew(rr, float(time))
    return events


@dataclass(frozen=True)
class StrategyStats:
    strategy: str
    rates: tuple
    planning_objective: float | None

    @property
    def mean(self) -> float:
        return float(np.mean(self.rates))

    @property
    def stderr(self) -> float:
        if len(self.rates) < 2:
            return 0.0
        return float(np.std(self.rates, ddof=1) / math.sqrt(len(self.rates)))

    @property
    def ci95(self) -> tuple:
        half = 1.96 * self.stderr
        return (self.mean - half, self.mean + half)


@dataclass(frozen=True)
class StudyReport:
    replications: int
    seed: int
    stats: tuple               # StrategyStats per strategy

    def stats_for(self, strategy: str) -> StrategyStats:
        for st in self.stats:
            if st.strategy == strategy:
                return st
        raise KeyError(strategy)

    def saving_pct(self, strategy: str, baseline: str = "cm-only") -> float:
        base = self.stats_for(baseline).mean
        return 100.0 * (1.0 - self.stats_for(strategy).mean / base)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["strategy", "mean_rate", "stderr", "ci95_lo", "ci95_hi",
                        "planning_objective", "saving_pct_vs_cm_only"])
            have_base = any(st.strategy == "cm-only" for st in self.stats)
            for st in self.stats:
                saving = ""
                if have_base and st.strategy != "cm-only":
                    saving = f"{self.saving_pct(st.strategy):.3f}"
                lo, hi = st.ci95
                w.writerow([st.strategy, f"{st.mean:.6f}", f"{st.stderr:.6f}",
                            f"{lo:.6f}", f"{hi:.6f}",
                            "" if st.planning_objective is None
                            else f"{st.planning_objective:.6f}", saving])

    def to_dict(self) -> dict:
        out = {"replications": self.replications, "seed": self.seed, "strategies": {}}
        for st in self.stats:
            lo, hi = st.ci95
            out["strategies"][st.strategy] = {
                "mean_rate": st.mean, "stderr": st.stderr, "ci95": [lo, hi],
                "planning_objective": st.planning_objective,
                "rates": list(st.rates)}
        return out


def run_study(config: SystemConfig, strategies, replications: int, seed: int,
              table_replications: int | None = None) -> StudyReport:
    """Paired-seed comparison of strategies: replication k of every strategy
    uses the same failure-trace seed, so differences are low-variance."""
    if replications < 1:
        raise ValueError("replications must be >= 1")
    rep_seeds = [derive_seed(seed, "study", k) for k in range(replications)]
    stats = []
    for strategy in strategies:
        rates = []
        planning_objective = None
        for rep_seed in rep_seeds:
            result = run_lifecycle(config, strategy, rep_seed,
                                   table_replications=table_replications)
            rates.append(result.monthly_rate)
        if strategy == "nextpm":
            _, plan = step_plan(SystemState.fresh(config), config, config.mc)
            planning_objective = plan.objective
        stats.append(StrategyStats(strategy=strategy, rates=tuple(rates),
                                   planning_objective=planning_objective))
    return StudyReport(replications=replications, seed=seed, stats=tuple(stats))


def export_events_json(result: LifecycleResult, path) -> None:
    with open(path, "w") as fh:
        json.dump(result.to_dict(), fh, indent=2)
