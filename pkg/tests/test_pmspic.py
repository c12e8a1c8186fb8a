import numpy as np
import pytest

from nextpm.costs import McSettings, SetupCostCalendar, expected_pm_cost
from nextpm.pmspic import (NO_PM, PmspicPlan, PmspicProblem,
                           brute_force_pmspic, build_pmspic_problem,
                           comparison_rows, comparison_to_csv,
                           first_pm_extract, pmspic_interval_cost,
                           shared_setup_lower_bound, solve_pmspic,
                           solve_pmspic_best_effort)


def test_interval_cost_short_interval_is_pm_cost(gearbox):
    val, se = pmspic_interval_cost(gearbox, 5.0, 3.0, 1,
                                   McSettings(replications=50000, seed=1))
    assert val == pytest.approx(gearbox.pm_cost, abs=max(3 * se, 1e-3))


def test_conventions_agree_on_first_failure(gearbox):
    """Truncated to at most one failure, both discount arguments coincide
    (U_1 = L_1), so the convention gap is driven by later failures only."""
    # compare on an interval short enough that two failures are very rare
    t = 25
    settings = McSettings(replications=200000, seed=2)
    d5 = SetupCostCalendar.constant(5.0, 240)
    ours, se1 = expected_pm_cost(gearbox, d5, 3.0, 0, 0.0, t, settings)
    theirs, se2 = pmspic_interval_cost(gearbox, 5.0, 3.0, t, settings)
    assert ours == pytest.approx(theirs, abs=4 * (se1 + se2) + 0.02)


def test_convention_gap_sign_at_study_month(gearbox):
    # the absolute-time argument grows with each failure, inflating the
    # subtracted discount, so the interval-cost model sits below ours
    settings = McSettings(replications=300000, seed=3)
    d5 = SetupCostCalendar.constant(5.0, 240)
    ours, se1 = expected_pm_cost(gearbox, d5, 3.0, 0, 0.0, 51, settings)
    theirs, se2 = pmspic_interval_cost(gearbox, 5.0, 3.0, 51, settings)
    assert theirs <= ours + 4 * (se1 + se2)


def test_solver_matches_brute_force_small():
    rng = np.random.default_rng(5)
    for _ in range(60):
        n = int(rng.integers(1, 3))
        T = int(rng.integers(2, 9))
        costs = rng.integers(8, 400, size=(n, T + 1)) / 64.0
        d = float(rng.integers(0, 80)) / 16.0
        prob = PmspicProblem(horizon=T, setup=d, costs=costs,
                             component_ids=tuple(range(1, n + 1)))
        assert solve_pmspic(prob).objective == brute_force_pmspic(prob).objective


def test_deferral_dominance():
    costs = np.full((2, 9), 100.0)
    costs[:, -1] = 1.0
    prob = PmspicProblem(horizon=8, setup=2.0, costs=costs,
                         component_ids=(1, 2))
    plan = solve_pmspic(prob)
    assert plan.z == (0,) * 8
    assert plan.chains == ((), ())
    assert plan.objective == pytest.approx(2.0)
    assert first_pm_extract(plan) == (NO_PM, ())


def test_zero_setup_separates_components():
    rng = np.random.default_rng(6)
    costs = rng.integers(8, 400, size=(2, 9)) / 64.0
    prob = PmspicProblem(horizon=8, setup=0.0, costs=costs,
                         component_ids=(1, 2))
    joint = solve_pmspic(prob)
    total = 0.0
    for row in (0, 1):
        solo = PmspicProblem(horizon=8, setup=0.0, costs=costs[row:row + 1],
                             component_ids=(row + 1,))
        total += solve_pmspic(solo).objective
    assert joint.objective == pytest.approx(total)


def test_plan_flow_balance_enforced():
    with pytest.raises(ValueError):
        PmspicPlan(z=(1, 0, 0), chains=((2,),), objective=1.0,
                   component_ids=(1,))
    with pytest.raises(ValueError):
        PmspicPlan(z=(1, 1, 0), chains=((2, 1),), objective=1.0,
                   component_ids=(1,))


def test_exact_cap_enforced():
    costs = np.ones((1, 41))
    prob = PmspicProblem(horizon=40, setup=1.0, costs=costs,
                         component_ids=(1,))
    with pytest.raises(ValueError, match="best"):
        solve_pmspic(prob)


def test_best_effort_incumbent_and_bound():
    rng = np.random.default_rng(7)
    T = 60
    # cost curves shaped like the real ones: cheap PM early, failures later
    base = np.linspace(30, 400, T + 1) ** 1.1
    costs = np.vstack([base * f for f in (1.0, 0.8)])
    prob = PmspicProblem(horizon=T, setup=6.0, costs=costs,
                         component_ids=(1, 2))
    plan = solve_pmspic_best_effort(prob, time_limit=3.0)
    assert not plan.optimal
    assert plan.lower_bound is not None
    assert plan.lower_bound <= plan.objective + 1e-9
    assert plan.lower_bound == pytest.approx(shared_setup_lower_bound(prob))


def test_best_effort_matches_exact_on_small_instance():
    rng = np.random.default_rng(8)
    costs = rng.integers(8, 400, size=(2, 11)) / 64.0
    prob = PmspicProblem(horizon=10, setup=3.0, costs=costs,
                         component_ids=(1, 2))
    exact = solve_pmspic(prob)
    heur = solve_pmspic_best_effort(prob, time_limit=2.0)
    assert heur.objective >= exact.objective - 1e-9
    assert heur.objective <= exact.objective * 1.05 + 1e-9


def test_first_pm_extract_variants():
    plan = PmspicPlan(z=(0, 1, 0, 1), chains=((2, 4), (4,)), objective=0.0,
                      component_ids=(1, 2))
    assert first_pm_extract(plan) == (2, (1,))


def test_comparison_rows_and_csv(turbine, tmp_path):
    rows = comparison_rows(turbine, 5.0, 3.0, 36, 30,
                           McSettings(replications=3000, seed=9),
                           time_limit=5.0)
    assert [r.strategy for r in rows] == ["nextpm", "pmspic"]
    assert rows[1].optimal                    # T=36 solves exactly
    out = tmp_path / "cmp.csv"
    comparison_to_csv(rows, (1, 2, 3, 4), out)
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 3
    assert lines[0].split(",")[0] == "strategy"
