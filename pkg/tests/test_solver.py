import numpy as np
import pytest

from nextpm.solver import (NextOmProblem, NextPmProblem, brute_force_next_om,
                           brute_force_next_pm, check_pm_plan, plan_objective,
                           solve_next_om, solve_next_pm, solve_next_pm_bnb)


def random_pm_problem(rng, n_max=3, window_max=10):
    n = int(rng.integers(1, n_max + 1))
    s = int(rng.integers(0, 5))
    r = s + int(rng.integers(1, window_max + 1))
    nt = r - s + 1
    # dyadic values keep float sums order-independent
    setup = rng.integers(0, 64, size=nt) / 8.0
    c = rng.integers(1, 512, size=(n, nt)) / 8.0
    D = rng.integers(-256, 512, size=(n, nt - 1)) / 8.0
    return NextPmProblem(s=s, r=r, setup=setup.astype(float), c=c, D=D,
                         component_ids=tuple(range(1, n + 1)))


def random_om_problem(rng, n_max=5):
    n = int(rng.integers(1, n_max + 1))
    s = int(rng.integers(0, 30))
    setup = rng.integers(0, 64, size=2) / 8.0
    c = rng.integers(-64, 512, size=(n, 2)) / 8.0
    D1 = rng.integers(-256, 512, size=n) / 8.0
    failed = int(rng.integers(1, n + 1))
    return NextOmProblem(failed=failed, s=s, setup=setup.astype(float), c=c,
                         D1=D1, component_ids=tuple(range(1, n + 1)))


def test_pm_solver_equals_brute_force():
    rng = np.random.default_rng(42)
    for _ in range(300):
        prob = random_pm_problem(rng)
        a = solve_next_pm(prob)
        b = brute_force_next_pm(prob)
        assert a.objective == b.objective
        assert a.assignment == b.assignment
        assert a.tau == b.tau and a.set_P == b.set_P
        check_pm_plan(prob, a)


def test_pm_bnb_matches_enumeration():
    rng = np.random.default_rng(43)
    for _ in range(100):
        prob = random_pm_problem(rng, n_max=3, window_max=8)
        assert solve_next_pm_bnb(prob).objective == solve_next_pm(prob).objective


def test_om_solver_equals_brute_force():
    rng = np.random.default_rng(44)
    for _ in range(300):
        prob = random_om_problem(rng)
        a = solve_next_om(prob)
        b = brute_force_next_om(prob)
        assert a.objective == b.objective
        assert a.set_O == b.set_O
        assert a.assignment == b.assignment


def test_deferral_always_feasible():
    # strongly negative benefits force the no-PM column
    prob = NextPmProblem(
        s=0, r=3, setup=np.array([5.0, 5.0, 5.0, 5.0]),
        c=np.array([[10.0, 10.0, 10.0, 1.0]]),
        D=np.array([[-1.0, -1.0, -1.0]]),
        component_ids=(1,))
    plan = solve_next_pm(prob)
    assert plan.tau == 4
    assert plan.set_P == ()


def test_cosched_when_setup_shared():
    # two components, sharing the occasion at t=2 beats splitting
    prob = NextPmProblem(
        s=0, r=2, setup=np.array([10.0, 10.0, 10.0]),
        c=np.array([[5.0, 4.0, 50.0], [5.0, 4.0, 50.0]]),
        D=np.array([[1.0, 1.0], [1.0, 1.0]]),
        component_ids=(1, 2))
    plan = solve_next_pm(prob)
    assert plan.tau == 2
    assert plan.set_P == (1, 2)
    assert plan.objective == pytest.approx((10.0 + 4.0 + 4.0) / 2)


def test_plan_objective_counts_setup_once():
    prob = NextPmProblem(
        s=0, r=2, setup=np.array([8.0, 6.0, 4.0]),
        c=np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]),
        D=np.array([[1.0, 1.0], [1.0, 1.0]]),
        component_ids=(1, 2))
    # both at month 1: setup charged once, weight 1/1
    assert plan_objective(prob, (1, 1)) == pytest.approx(8.0 + 1.0 + 1.0)
    # split across months: each occasion pays its own setup
    assert plan_objective(prob, (1, 2)) == pytest.approx(
        (8.0 + 1.0) / 1 + (6.0 + 2.0) / 2)


def test_om_second_slot_shared():
    # non-failed component defers when its second-month cost halves
    prob = NextOmProblem(
        failed=1, s=10, setup=np.array([5.0, 4.0]),
        c=np.array([[30.0, 30.0], [20.0, 20.0]]),
        D1=np.array([10.0, 10.0]),
        component_ids=(1, 2))
    plan = solve_next_om(prob)
    assert plan.set_O == ()                  # 20 > (20 + 4) / 2
    assert plan.objective == pytest.approx(5.0 + (20.0 + 4.0) / 2)


def test_om_negative_benefit_blocks_join():
    prob = NextOmProblem(
        failed=1, s=10, setup=np.array([5.0, 4.0]),
        c=np.array([[30.0, 30.0], [1.0, 100.0]]),
        D1=np.array([10.0, -1.0]),
        component_ids=(1, 2))
    plan = solve_next_om(prob)
    assert 2 not in plan.set_O


def test_problem_shape_validation():
    with pytest.raises(ValueError):
        NextPmProblem(s=0, r=2, setup=np.zeros(3), c=np.zeros((1, 2)),
                      D=np.zeros((1, 2)), component_ids=(1,))
    with pytest.raises(ValueError):
        NextOmProblem(failed=9, s=0, setup=np.zeros(2), c=np.zeros((1, 2)),
                      D1=np.zeros(1), component_ids=(1,))
