"""Exact solvers for the next-PM and opportunistic-maintenance binary programs.

The next-PM problem assigns every component one month in [s+1, r+1] (r+1 is
the "no PM this window" slot), pays the set-up cost once per occupied month,
and minimises the sum over occupied months of (set-up + component costs)
divided by months-from-now.  Because the objective is additive over occupied
months, enumerating set partitions of the components and giving each block
its best common month is exact; brute-force enumerators are provided as
oracles.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .costs import CostTables, SetupCostCalendar

ENUMERATION_CAP = 10
BRUTE_FORCE_CAP = 10_000_000
_TIE_CAP = 8  # months kept per block on exact cost ties


@dataclass(frozen=True)
class NextPmProblem:
    s: int
    r: int
    setup: np.ndarray        # d_{s+1} .. d_{r+1}
    c: np.ndarray            # (n, r - s + 1) expected PM costs
    D: np.ndarray            # (n, r - s) PM benefits
    component_ids: tuple
    D_stderr: np.ndarray | None = None

    def __post_init__(self):
        nt = self.r - self.s + 1
        if self.r < self.s + 1:
            raise ValueError(f"need r >= s+1, got s={self.s}, r={self.r}")
        if self.c.shape != (len(self.component_ids), nt):
            raise ValueError(f"c has shape {self.c.shape}, expected ({len(self.component_ids)}, {nt})")
        if self.D.shape != (len(self.component_ids), nt - 1):
            raise ValueError(f"D has shape {self.D.shape}, expected ({len(self.component_ids)}, {nt - 1})")
        if len(self.setup) != nt:
            raise ValueError(f"setup has {len(self.setup)} entries, expected {nt}")

    @classmethod
    def from_tables(cls, tables: CostTables, calendar: SetupCostCalendar) -> "NextPmProblem":
        setup = np.array([calendar.value(int(t)) for t in tables.t_grid])
        return cls(s=tables.s, r=tables.r, setup=setup, c=tables.c, D=tables.D,
                   component_ids=tables.component_ids, D_stderr=tables.D_stderr)

    @property
    def n(self) -> int:
        return len(self.component_ids)

    @property
    def months(self) -> np.ndarray:
        return np.arange(self.s + 1, self.r + 2)

    def feasible(self, row: int, t: int) -> bool:
        """PM of component `row` may be planned at month t."""
        if t == self.r + 1:
            return True
        return self.D[row, t - self.s - 1] >= 0


@dataclass(frozen=True)
class PmPlan:
    tau: int
    set_P: tuple             # component ids maintained at tau; () iff tau = r+1
    objective: float
    assignment: tuple        # month per component, problem row order
    component_ids: tuple
    marginal: tuple = ()     # (id, t) pairs whose benefit is within 1 stderr of 0


@dataclass(frozen=True)
class NextOmProblem:
    failed: int              # component id undergoing CM at s+1
    s: int
    setup: np.ndarray        # d_{s+1}, d_{s+2}
    c: np.ndarray            # (n, 2) costs at s+1, s+2
    D1: np.ndarray           # (n,) benefits at s+1
    component_ids: tuple
    D1_stderr: np.ndarray | None = None

    def __post_init__(self):
        if self.failed not in self.component_ids:
            raise ValueError(f"failed component {self.failed} not in {self.component_ids}")
        if self.c.shape != (len(self.component_ids), 2):
            raise ValueError(f"c has shape {self.c.shape}, expected ({len(self.component_ids)}, 2)")

    @classmethod
    def from_tables(cls, tables: CostTables, calendar: SetupCostCalendar,
                    failed: int) -> "NextOmProblem":
        if tables.r != tables.s + 1:
            raise ValueError("opportunistic tables must cover exactly (s+1, s+2)")
        setup = np.array([calendar.value(tables.s + 1), calendar.value(tables.s + 2)])
        return cls(failed=failed, s=tables.s, setup=setup, c=tables.c,
                   D1=tables.D[:, 0], component_ids=tables.component_ids,
                   D1_stderr=tables.D_stderr[:, 0])


@dataclass(frozen=True)
class OmPlan:
    set_O: tuple             # component ids opportunistically maintained at s+1
    objective: float
    assignment: tuple        # slot per non-failed component: s+1 or s+2
    component_ids: tuple
    marginal: tuple = ()


def plan_objective(problem: NextPmProblem, assignment) -> float:
    """Objective of a full month assignment, set-up charged once per
    occupied month; evaluation order is fixed so ties are reproducible."""
    s = problem.s
    by_month: dict[int, float] = {}
    for row, t in enumerate(assignment):
        by_month[t] = by_month.get(t, 0.0) + problem.c[row, t - s - 1]
    total = 0.0
    for t in sorted(by_month):
        total += (problem.setup[t - s - 1] + by_month[t]) / (t - s)
    return total


def _marginal_flags(problem: NextPmProblem, assignment) -> tuple:
    if problem.D_stderr is None:
        return ()
    flags = []
    for row, t in enumerate(assignment):
        if t <= problem.r:
            col = t - problem.s - 1
            if abs(problem.D[row, col]) <= problem.D_stderr[row, col]:
                flags.append((problem.component_ids[row], int(t)))
    return tuple(flags)


def _plan_from_assignment(problem: NextPmProblem, assignment, objective) -> PmPlan:
    tau = min(assignment)
    if tau == problem.r + 1:
        set_P = ()
    else:
        set_P = tuple(problem.component_ids[row]
                      for row, t in enumerate(assignment) if t == tau)
    return PmPlan(tau=int(tau), set_P=set_P, objective=float(objective),
                  assignment=tuple(int(t) for t in assignment),
                  component_ids=problem.component_ids,
                  marginal=_marginal_flags(problem, assignment))


def _plan_key(problem: NextPmProblem, assignment):
    objective = plan_objective(problem, assignment)
    tau = min(assignment)
    set_P = tuple(sorted(problem.component_ids[row]
                         for row, t in enumerate(assignment) if t == tau)) \
        if tau <= problem.r else ()
    return (objective, tau, set_P, tuple(assignment)), objective


def _set_partitions(items):
    """All partitions of `items` into nonempty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for smaller in _set_partitions(rest):
        for i in range(len(smaller)):
            yield smaller[:i] + [[first] + smaller[i]] + smaller[i + 1:]
        yield [[first]] + smaller


def solve_next_pm(problem: NextPmProblem) -> PmPlan:
    """Exact minimiser via set-partition enumeration (n <= 10).

    Each block of a partition is assigned its cheapest common feasible month;
    candidates are then re-evaluated with the shared-set-up objective, which
    also covers the case of two blocks landing on the same month.  Ties break
    by objective, then earliest tau, then lexicographically smallest set,
    then assignment.
    """
    n = problem.n
    if n > ENUMERATION_CAP:
        raise ValueError(
            f"{n} components exceeds the set-partition enumeration cap "
            f"({ENUMERATION_CAP}); use solve_next_pm_bnb")
    s, r = problem.s, problem.r
    nt = r - s + 1
    feas_mask = np.ones((n, nt), dtype=bool)
    feas_mask[:, :-1] = problem.D >= 0
    span = np.arange(1, nt + 1, dtype=float)

    def block_months(block):
        """Cheapest common feasible months of a block (ties kept, ascending)."""
        cost = (problem.setup + problem.c[list(block)].sum(axis=0)) / span
        cost[~feas_mask[list(block)].all(axis=0)] = np.inf
        tied = np.flatnonzero(cost == cost.min())[:_TIE_CAP]
        return [int(s + 1 + col) for col in tied]

    month_cache: dict = {}
    best_key = None
    best_assignment = None
    for partition in _set_partitions(range(n)):
        choices = []
        for block in partition:
            key = tuple(block)
            tied = month_cache.get(key)
            if tied is None:
                tied = month_cache[key] = block_months(key)
            choices.append((block, tied))
        for combo in itertools.product(*(tied for _, tied in choices)):
            assignment = [0] * n
            for (block, _), t in zip(choices, combo):
                for row in block:
                    assignment[row] = t
            key, objective = _plan_key(problem, assignment)
            if best_key is None or key < best_key:
                best_key = key
                best_assignment = (assignment, objective)
    assignment, objective = best_assignment
    return _plan_from_assignment(problem, assignment, objective)


def solve_next_pm_bnb(problem: NextPmProblem) -> PmPlan:
    """Branch-and-bound fallback for n beyond the enumeration cap.

    Branches on per-component month choices in row order; the bound adds, for
    each unassigned component, its best month cost ignoring set-up sharing
    (a valid lower bound since set-ups only add cost).
    """
    n = problem.n
    s = problem.s
    months = [t for t in range(s + 1, problem.r + 2)]
    feas = [[t for t in months if problem.feasible(row, t)] for row in range(n)]
    # per-component lower bound: cheapest c/(t-s) over feasible months
    comp_lb = [min(problem.c[row, t - s - 1] / (t - s) for t in feas[row])
               for row in range(n)]
    suffix_lb = [0.0] * (n + 1)
    for row in range(n - 1, -1, -1):
        suffix_lb[row] = suffix_lb[row + 1] + comp_lb[row]

    best: dict = {"key": None, "plan": None}

    def lower_bound(partial):
        return plan_objective_partial(partial) + suffix_lb[len(partial)]

    def plan_objective_partial(partial):
        by_month: dict[int, float] = {}
        for row, t in enumerate(partial):
            by_month[t] = by_month.get(t, 0.0) + problem.c[row, t - s - 1]
        return sum((problem.setup[t - s - 1] + v) / (t - s)
                   for t, v in by_month.items())

    def recurse(partial):
        if len(partial) == n:
            key, objective = _plan_key(problem, partial)
            if best["key"] is None or key < best["key"]:
                best["key"] = key
                best["plan"] = (list(partial), objective)
            return
        if best["key"] is not None and lower_bound(partial) > best["key"][0]:
            return
        row = len(partial)
        for t in feas[row]:
            partial.append(t)
            recurse(partial)
            partial.pop()

    recurse([])
    assignment, objective = best["plan"]
    return _plan_from_assignment(problem, assignment, objective)


def brute_force_next_pm(problem: NextPmProblem) -> PmPlan:
    """Exhaustive oracle over all feasible assignments."""
    n = problem.n
    nt = problem.r - problem.s + 1
    if nt**n > BRUTE_FORCE_CAP:
        raise ValueError(f"{nt}^{n} assignments exceed the brute-force cap")
    months = range(problem.s + 1, problem.r + 2)
    feas = [[t for t in months if problem.feasible(row, t)] for row in range(n)]
    best_key = None
    best = None
    for assignment in itertools.product(*feas):
        key, objective = _plan_key(problem, assignment)
        if best_key is None or key < best_key:
            best_key = key
            best = (assignment, objective)
    assignment, objective = best
    return _plan_from_assignment(problem, assignment, objective)


def check_pm_plan(problem: NextPmProblem, plan: PmPlan) -> None:
    """Raise if the plan violates any model constraint."""
    if len(plan.assignment) != problem.n:
        raise AssertionError("assignment length mismatch")
    for row, t in enumerate(plan.assignment):
        if not problem.s + 1 <= t <= problem.r + 1:
            raise AssertionError(f"month {t} outside window")
        if not problem.feasible(row, t):
            raise AssertionError(f"component row {row} at infeasible month {t}")
    tau = min(plan.assignment)
    if plan.tau != tau:
        raise AssertionError("tau is not the earliest assigned month")
    expected_P = tuple(problem.component_ids[row]
                       for row, t in enumerate(plan.assignment) if t == tau) \
        if tau <= problem.r else ()
    if tuple(plan.set_P) != expected_P:
        raise AssertionError("set_P does not match the assignment")
    if tau == problem.r + 1 and plan.set_P != ():
        raise AssertionError("deferral plan must have an empty set")


def _om_objective(problem: NextOmProblem, slots) -> float:
    """slots: per non-failed row, 0 for s+1 or 1 for s+2.  The CM set-up at
    s+1 is always charged; the s+2 set-up only when someone uses the slot."""
    total = float(problem.setup[0])
    use_second = False
    for row, slot in slots:
        if slot == 0:
            total += problem.c[row, 0]
        else:
            use_second = True
            total += problem.c[row, 1] / 2.0
    if use_second:
        total += problem.setup[1] / 2.0
    return total


def _om_rows(problem: NextOmProblem):
    failed_row = problem.component_ids.index(problem.failed)
    return failed_row, [row for row in range(len(problem.component_ids))
                        if row != failed_row]


def _om_plan(problem: NextOmProblem, slots) -> OmPlan:
    objective = _om_objective(problem, slots)
    set_O = tuple(problem.component_ids[row] for row, slot in slots if slot == 0)
    marginal = ()
    if problem.D1_stderr is not None:
        marginal = tuple((problem.component_ids[row], problem.s + 1)
                         for row, slot in slots
                         if slot == 0 and abs(problem.D1[row]) <= problem.D1_stderr[row])
    return OmPlan(set_O=set_O, objective=float(objective),
                  assignment=tuple(problem.s + 1 + slot for _, slot in slots),
                  component_ids=tuple(problem.component_ids[row] for row, _ in slots),
                  marginal=marginal)


def solve_next_om(problem: NextOmProblem) -> OmPlan:
    """Exact minimiser by case split on whether the month after the repair
    is opened; within each case every component independently takes its
    cheaper feasible slot."""
    _, others = _om_rows(problem)
    candidates = []
    # case: second month closed; everyone joins the CM occasion
    if all(problem.D1[row] >= 0 for row in others):
        candidates.append([(row, 0) for row in others])
    # case: second month open
    slots = []
    for row in others:
        if problem.D1[row] >= 0 and problem.c[row, 0] <= problem.c[row, 1] / 2.0:
            slots.append((row, 0))
        else:
            slots.append((row, 1))
    candidates.append(slots)

    best = None
    best_key = None
    for slots in candidates:
        objective = _om_objective(problem, slots)
        key = (objective, tuple(slot for _, slot in slots))
        if best_key is None or key < best_key:
            best_key = key
            best = slots
    return _om_plan(problem, best)


def brute_force_next_om(problem: NextOmProblem) -> OmPlan:
    """Exhaustive oracle over all slot assignments of non-failed components."""
    _, others = _om_rows(problem)
    if len(others) > 20:
        raise ValueError("too many components for the brute-force oracle")
    best = None
    best_key = None
    for combo in itertools.product((0, 1), repeat=len(others)):
        if any(slot == 0 and problem.D1[row] < 0
               for row, slot in zip(others, combo)):
            continue
        slots = list(zip(others, combo))
        objective = _om_objective(problem, slots)
        key = (objective, combo)
        if best_key is None or key < best_key:
            best_key = key
            best = slots
    return _om_plan(problem, best)
