"""Whole-horizon interval-cost planning model used for comparison studies.

Plans all renewals over [0, T] at once: each component follows a chain of
renewal months, each interval of length t contributing an expected cost that
charges every failure in the interval with the ABSOLUTE renewal-clock time as
the discount argument.  The next-PM planner (`solver`) instead discounts by
the inter-failure time; this module keeps the absolute-time convention on
purpose so the two models can be compared on equal instances.

Defined for constant set-up cost and an initially-new system only.
"""
from __future__ import annotations

import csv
import itertools
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .costs import McSettings, SetupCostCalendar, _simulate_paths
from .lifetime import ComponentSpec
from .streams import substream

EXACT_HORIZON_CAP = 36


@dataclass(frozen=True)
class PmspicProblem:
    horizon: int               # T
    setup: float               # constant d
    costs: np.ndarray          # (n, T+1): interval cost for lengths 1..T+1
    component_ids: tuple

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.costs.shape != (len(self.component_ids), self.horizon + 1):
            raise ValueError(
                f"costs has shape {self.costs.shape}, expected "
                f"({len(self.component_ids)}, {self.horizon + 1})")
        if not np.all(np.isfinite(self.costs)):
            raise ValueError("interval costs must be finite")

    @property
    def n(self) -> int:
        return len(self.component_ids)

    def interval_cost(self, row: int, length: int) -> float:
        return float(self.costs[row, length - 1])


@dataclass(frozen=True)
class PmspicPlan:
    z: tuple                   # z_1..z_T
    chains: tuple              # per component: months in (0, T] where it renews
    objective: float
    component_ids: tuple
    optimal: bool = True
    lower_bound: float | None = None

    def __post_init__(self):
        # flow balance: every chain is strictly increasing and stays on open months
        for chain in self.chains:
            if list(chain) != sorted(set(chain)):
                raise ValueError(f"renewal chain {chain} is not a strict chain")
            for t in chain:
                if not (1 <= t <= len(self.z) and self.z[t - 1] == 1):
                    raise ValueError(f"renewal at {t} on a closed month")


def pmspic_interval_cost(spec: ComponentSpec, d: float, lam: float, t: int,
                         settings: McSettings):
    """Expected cost of one renewal interval of length t: the PM cost at the
    far end plus every in-interval failure charged

        b + d - (U_i / t)^lam (c + d),

    U_i the failure time on the renewal clock.  Returns (estimate, stderr)."""
    if t < 1:
        raise ValueError(f"interval length must be >= 1, got {t}")
    costs, stderr = _interval_cost_curve(spec, d, lam, np.array([float(t)]),
                                         settings)
    return float(costs[0]), float(stderr[0])


def _interval_cost_curve(spec: ComponentSpec, d: float, lam: float,
                         t_grid: np.ndarray, settings: McSettings):
    rng = substream(settings.seed, "interval-costs", spec.id)
    bound = float(t_grid.max())
    d_ext = np.full(int(2 * bound) + 3, float(d))
    total = np.zeros(len(t_grid))
    total_sq = np.zeros(len(t_grid))
    reps = settings.replications
    done = 0
    chunk = 100_000
    while done < reps:
        m = min(chunk, reps - done)
        _, _, fails, _ = _simulate_paths(spec, 0.0, 0.0, bound, -1.0, m, rng)
        # feeding the absolute failure times as the "inter-failure" argument
        # makes the shared kernel discount by the renewal-clock age
        acc = kernels.accumulate_pm_g(np.zeros_like(fails), fails, fails,
                                      t_grid, 0.0, spec.cm_cost, spec.pm_cost,
                                      float(lam), d_ext)
        rep_costs = spec.pm_cost + acc
        total += rep_costs.sum(axis=0)
        total_sq += (rep_costs * rep_costs).sum(axis=0)
        done += m
    mean = total / reps
    if reps > 1:
        var = np.maximum(total_sq - reps * mean * mean, 0.0) / (reps - 1)
        stderr = np.sqrt(var / reps)
    else:
        stderr = np.zeros_like(mean)
    return mean, stderr


def build_pmspic_problem(components, d: float, lam: float, T: int,
                         settings: McSettings) -> PmspicProblem:
    """Monte Carlo interval-cost arrays for every length 1..T+1."""
    components = list(components)
    t_grid = np.arange(1, T + 2, dtype=np.float64)
    costs = np.zeros((len(components), T + 1))
    for row, spec in enumerate(components):
        costs[row], _ = _interval_cost_curve(spec, d, lam, t_grid, settings)
    return PmspicProblem(horizon=T, setup=float(d), costs=costs,
                         component_ids=tuple(spec.id for spec in components))


def _shortest_chain(problem: PmspicProblem, row: int, nodes):
    """Cheapest renewal chain 0 -> T+1 through the given open months.

    nodes: sorted months, first 0 and last T+1.  Returns (cost, chain) with
    the chain excluding the endpoints.  Ties prefer the earliest predecessor,
    which makes the returned chain deterministic."""
    best = [np.inf] * len(nodes)
    back = [0] * len(nodes)
    best[0] = 0.0
    for k in range(1, len(nodes)):
        for p in range(k):
            length = nodes[k] - nodes[p]
            cand = best[p] + problem.interval_cost(row, length)
            if cand < best[k] - 1e-12:
                best[k] = cand
                back[k] = p
    chain = []
    k = len(nodes) - 1
    while k != 0:
        chain.append(nodes[k])
        k = back[k]
    chain.reverse()
    return best[-1], tuple(t for t in chain if t <= problem.horizon)


def plan_total(problem: PmspicProblem, chains, open_months=None) -> float:
    """Canonical objective of a set of renewal chains: set-up per open month
    plus interval costs summed chain by chain.  Solver and oracle both report
    through this, so equal structures give bit-identical objectives."""
    if open_months is None:
        open_months = sorted({t for chain in chains for t in chain})
    total = problem.setup * len(open_months)
    for row, chain in enumerate(chains):
        prev = 0
        for t in chain:
            total += problem.interval_cost(row, t - prev)
            prev = t
        total += problem.interval_cost(row, problem.horizon + 1 - prev)
    return total


def _evaluate_open_set(problem: PmspicProblem, open_months) -> tuple:
    """Objective and chains for a fixed set of open months (d charged per
    open month whether used or not)."""
    nodes = [0] + sorted(open_months) + [problem.horizon + 1]
    chains = tuple(_shortest_chain(problem, row, nodes)[1]
                   for row in range(problem.n))
    return plan_total(problem, chains, sorted(open_months)), chains


def _plan_from_open_set(problem: PmspicProblem, open_months,
                        optimal: bool, lower_bound=None) -> PmspicPlan:
    # drop open months no chain uses; they only add set-up cost
    _, chains = _evaluate_open_set(problem, open_months)
    used = sorted({t for chain in chains for t in chain})
    objective, chains = _evaluate_open_set(problem, used)
    z = tuple(1 if t in set(used) else 0 for t in range(1, problem.horizon + 1))
    return PmspicPlan(z=z, chains=chains, objective=float(objective),
                      component_ids=problem.component_ids, optimal=optimal,
                      lower_bound=lower_bound)


def shared_setup_lower_bound(problem: PmspicProblem) -> float:
    """Valid lower bound: every renewal pays only its 1/n share of the
    set-up cost, all months open."""
    nodes = list(range(0, problem.horizon + 2))
    share = problem.setup / problem.n
    total = 0.0
    for row in range(problem.n):
        best = [np.inf] * len(nodes)
        best[0] = 0.0
        for k in range(1, len(nodes)):
            extra = share if nodes[k] <= problem.horizon else 0.0
            for p in range(k):
                cand = best[p] + problem.interval_cost(row, nodes[k] - nodes[p]) + extra
                if cand < best[k]:
                    best[k] = cand
        total += best[-1]
    return float(total)


def solve_pmspic(problem: PmspicProblem) -> PmspicPlan:
    """Exact optimum by depth-first branch and bound over the open-month
    vector; each node is bounded by the chains through the months already
    open plus every undecided month, with set-up charged only for the
    former."""
    T = problem.horizon
    if T > EXACT_HORIZON_CAP:
        raise ValueError(
            f"exact solve supported for horizons up to {EXACT_HORIZON_CAP}; "
            f"use solve_pmspic_best_effort for T={T}")

    incumbent_obj, incumbent_open = _initial_incumbent(problem)
    state = {"best": incumbent_obj, "open": incumbent_open}

    def bound(open_fixed, k):
        # months 1..k-1 are decided (open ones listed), k..T still free
        nodes = [0] + sorted(set(open_fixed) | set(range(k, T + 1))) + [T + 1]
        total = problem.setup * len(open_fixed)
        for row in range(problem.n):
            cost, _ = _shortest_chain(problem, row, nodes)
            total += cost
        return total

    def recurse(open_fixed, k):
        if k > T:
            obj, _ = _evaluate_open_set(problem, open_fixed)
            if obj < state["best"] - 1e-12:
                state["best"] = obj
                state["open"] = list(open_fixed)
            return
        if bound(open_fixed, k) > state["best"] + 1e-9:
            return
        recurse(open_fixed + [k], k + 1)
        recurse(open_fixed, k + 1)

    recurse([], 1)
    return _plan_from_open_set(problem, state["open"], optimal=True)


def solve_pmspic_best_effort(problem: PmspicProblem,
                             time_limit: float = 10.0) -> PmspicPlan:
    """Incumbent search for large horizons: periodic-grid seeding plus
    single-month local moves, stopped at the time limit.  The returned plan
    is labeled non-optimal and carries a valid lower bound."""
    deadline = time.monotonic() + time_limit
    lb = shared_setup_lower_bound(problem)
    best_obj, best_open = _initial_incumbent(problem)

    improved = True
    while improved and time.monotonic() < deadline:
        improved = False
        current = set(best_open)
        for t in range(1, problem.horizon + 1):
            if time.monotonic() >= deadline:
                break
            trial = current ^ {t}
            obj, chains = _evaluate_open_set(problem, trial)
            used = {m for chain in chains for m in chain}
            obj -= problem.setup * len(trial - used)
            if obj < best_obj - 1e-9:
                best_obj = obj
                best_open = sorted(used)
                improved = True
                current = set(best_open)
    return _plan_from_open_set(problem, best_open, optimal=False, lower_bound=lb)


def _initial_incumbent(problem: PmspicProblem):
    """Seed: best periodic grid, plus the union of per-component chains that
    each pay the full set-up alone."""
    T = problem.horizon
    best_obj = np.inf
    best_open: list = []
    for period in range(1, T + 2):
        open_months = list(range(period, T + 1, period))
        obj, chains = _evaluate_open_set(problem, open_months)
        used = sorted({t for chain in chains for t in chain})
        if used != open_months:
            obj, _ = _evaluate_open_set(problem, used)
            open_months = used
        if obj < best_obj:
            best_obj = obj
            best_open = open_months

    solo_union = set()
    nodes = list(range(0, T + 2))
    for row in range(problem.n):
        # chain a lone component would pick if it paid the full set-up itself
        solo = PmspicProblem(horizon=T, setup=problem.setup,
                             costs=problem.costs[row:row + 1],
                             component_ids=(problem.component_ids[row],))
        best = [np.inf] * len(nodes)
        back = [0] * len(nodes)
        best[0] = 0.0
        for k in range(1, len(nodes)):
            extra = solo.setup if nodes[k] <= T else 0.0
            for p in range(k):
                cand = best[p] + solo.interval_cost(0, nodes[k] - nodes[p]) + extra
                if cand < best[k] - 1e-12:
                    best[k] = cand
                    back[k] = p
        k = len(nodes) - 1
        while k != 0:
            if nodes[k] <= T:
                solo_union.add(nodes[k])
            k = back[k]
    if solo_union:
        obj, chains = _evaluate_open_set(problem, sorted(solo_union))
        used = sorted({t for chain in chains for t in chain})
        obj, _ = _evaluate_open_set(problem, used)
        if obj < best_obj:
            best_obj = obj
            best_open = used
    return best_obj, best_open


def brute_force_pmspic(problem: PmspicProblem) -> PmspicPlan:
    """Exhaustive oracle: every combination of per-component renewal chains."""
    T = problem.horizon
    if problem.n * T > 20:
        raise ValueError("instance too large for the brute-force oracle")
    month_sets = list(itertools.chain.from_iterable(
        itertools.combinations(range(1, T + 1), k) for k in range(T + 1)))
    best = None
    for combo in itertools.product(month_sets, repeat=problem.n):
        z_used = sorted({t for chain in combo for t in chain})
        total = plan_total(problem, combo, z_used)
        key = (total, tuple(z_used), combo)
        if best is None or key < best[0]:
            best = (key, combo, z_used)
    _, combo, z_used = best
    z = tuple(1 if t in set(z_used) else 0 for t in range(1, T + 1))
    return PmspicPlan(z=z, chains=tuple(combo), objective=float(best[0][0]),
                      component_ids=problem.component_ids, optimal=True)


NO_PM = -1


def first_pm_extract(plan: PmspicPlan):
    """Earliest maintained month and the components renewing there;
    (NO_PM, ()) when the plan schedules nothing."""
    first = None
    for t, open_ in enumerate(plan.z, start=1):
        if open_:
            first = t
            break
    if first is None:
        return NO_PM, ()
    members = tuple(cid for cid, chain in zip(plan.component_ids, plan.chains)
                    if chain and chain[0] == first)
    return first, members


def pmspic_monthly_cost(problem: PmspicProblem, plan: PmspicPlan) -> float:
    """Cost rate of the first planned occasion: set-up plus the interval
    costs of the components renewing then, per month elapsed."""
    first, members = first_pm_extract(plan)
    if first == NO_PM:
        return float("inf")
    total = problem.setup
    for cid in members:
        row = problem.component_ids.index(cid)
        total += problem.interval_cost(row, first)
    return total / first


@dataclass(frozen=True)
class ComparisonRow:
    strategy: str
    first_months: tuple        # per component; NO_PM when not in the first occasion
    monthly_cost: float
    solve_seconds: float
    optimal: bool
    lower_bound: float | None = None


def comparison_rows(components, d: float, lam: float, T: int, window: int,
                    settings: McSettings, time_limit: float = 10.0):
    """§-style head-to-head on one constant-set-up instance: next-PM planning
    versus the whole-horizon interval-cost model, first occasion only."""
    from .costs import build_cost_tables
    from .solver import NextPmProblem, solve_next_pm

    components = list(components)
    ids = [spec.id for spec in components]
    calendar = SetupCostCalendar.constant(d, T)
    rows = []

    tables = build_cost_tables(components, calendar, lam, 0, [0] * len(ids),
                               min(window, T), T, settings)
    t0 = time.perf_counter()
    plan = solve_next_pm(NextPmProblem.from_tables(tables, calendar))
    solve_s = time.perf_counter() - t0
    first = tuple(plan.tau if cid in plan.set_P else NO_PM for cid in ids)
    rows.append(ComparisonRow(strategy="nextpm", first_months=first,
                              monthly_cost=float(plan.objective),
                              solve_seconds=solve_s, optimal=True))

    problem = build_pmspic_problem(components, d, lam, T, settings)
    t0 = time.perf_counter()
    if T <= EXACT_HORIZON_CAP:
        pplan = solve_pmspic(problem)
    else:
        pplan = solve_pmspic_best_effort(problem, time_limit=time_limit)
    solve_s = time.perf_counter() - t0
    pfirst_t, pmembers = first_pm_extract(pplan)
    pfirst = tuple(pfirst_t if cid in pmembers else NO_PM for cid in ids)
    rows.append(ComparisonRow(strategy="pmspic", first_months=pfirst,
                              monthly_cost=pmspic_monthly_cost(problem, pplan),
                              solve_seconds=solve_s, optimal=pplan.optimal,
                              lower_bound=pplan.lower_bound))
    return rows


def comparison_to_csv(rows, component_ids, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["strategy"]
                   + [f"first_month_{cid}" for cid in component_ids]
                   + ["monthly_cost", "solve_seconds", "optimal", "lower_bound"])
        for row in rows:
            w.writerow([row.strategy]
                       + ["" if m == NO_PM else m for m in row.first_months]
                       + [f"{row.monthly_cost:.6f}", f"{row.solve_seconds:.6f}",
                          int(row.optimal),
                          "" if row.lower_bound is None else f"{row.lower_bound:.6f}"])
