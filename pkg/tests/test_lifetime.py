import math

import numpy as np
import pytest

from nextpm.lifetime import (ComponentSpec, density, lives_from_uniforms,
                             moments, residual_total_from_uniforms,
                             sample_life, sample_residual_life, survival)

from conftest import approx_weibull_mean


def test_spec_validation():
    with pytest.raises(ValueError):
        ComponentSpec(id=1, alpha=0, beta=3, cm_cost=1, pm_cost=1)
    with pytest.raises(ValueError):
        ComponentSpec(id=1, alpha=80, beta=-1, cm_cost=1, pm_cost=1)
    with pytest.warns(UserWarning):
        ComponentSpec(id=1, alpha=80, beta=3, cm_cost=1, pm_cost=2)


def test_survival_values(gearbox):
    assert survival(gearbox, 0.0) == 1.0
    assert survival(gearbox, 80.0) == pytest.approx(math.exp(-1))
    rotor = ComponentSpec(id=1, alpha=100, beta=3, cm_cost=162, pm_cost=36.75)
    assert survival(rotor, 50.0) == pytest.approx(math.exp(-0.125))
    ts = np.linspace(0, 300, 50)
    vals = [survival(gearbox, t) for t in ts]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        survival(gearbox, -1.0)


def test_density_integrates_to_one(gearbox):
    t = np.linspace(0, 400, 4001)
    f = np.array([density(gearbox, x) for x in t])
    assert np.trapezoid(f, t) == pytest.approx(1.0, abs=1e-5)
    # density is the negative derivative of survival
    h = 1e-5
    for x in (10.0, 50.0, 120.0):
        num = (survival(gearbox, x - h) - survival(gearbox, x + h)) / (2 * h)
        assert density(gearbox, x) == pytest.approx(num, rel=1e-5)


def test_moments_match_quadrature(turbine):
    for spec in turbine:
        mom = moments(spec)
        assert mom.mean == pytest.approx(spec.alpha * math.gamma(1 + 1 / spec.beta))
        assert mom.mean == pytest.approx(
            approx_weibull_mean(spec.alpha, spec.beta), rel=1e-5)
        assert mom.variance > 0


def test_inverse_cdf_sampling(gearbox):
    u = np.array([0.1, 0.5, 0.9])
    lives = lives_from_uniforms(gearbox, u)
    expect = 80.0 * (-np.log(u)) ** (1 / 3)
    np.testing.assert_allclose(lives, expect)
    # empirical CDF agrees with survival
    rng = np.random.default_rng(1)
    draws = np.array([sample_life(gearbox, rng) for _ in range(20000)])
    frac = (draws > 80.0).mean()
    assert frac == pytest.approx(math.exp(-1), abs=0.01)


def test_residual_sampling_conditions_on_age(gearbox):
    age = 60.0
    u = np.linspace(0.01, 0.99, 99)
    total = residual_total_from_uniforms(gearbox, age, u)
    assert np.all(total > age)
    # conditional tail: P(L > x | L > age) = S(x)/S(age)
    rng = np.random.default_rng(2)
    # returns the TOTAL life conditioned on surviving past `age`
    draws = np.array([sample_residual_life(gearbox, age, rng)
                      for _ in range(20000)])
    assert np.all(draws > age)
    x = 90.0
    frac = (draws > x).mean()
    expect = survival(gearbox, x) / survival(gearbox, age)
    assert frac == pytest.approx(expect, abs=0.015)


def test_residual_age_zero_equals_unconditional(gearbox):
    u = np.array([0.2, 0.7])
    np.testing.assert_allclose(residual_total_from_uniforms(gearbox, 0.0, u),
                               lives_from_uniforms(gearbox, u))
