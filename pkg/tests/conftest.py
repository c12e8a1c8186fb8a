import numpy as np
import pytest

from nextpm.costs import SetupCostCalendar
from nextpm.lifetime import ComponentSpec

WINTER = (7.5, 6.5, 5.5, 4.5, 3.5, 2.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5)
SUMMER = WINTER[6:] + WINTER[:6]


@pytest.fixture(scope="session")
def turbine():
    """The four-component system used across the numerical studies."""
    return (
        ComponentSpec(id=1, alpha=100, beta=3, cm_cost=162, pm_cost=36.75,
                      name="rotor"),
        ComponentSpec(id=2, alpha=125, beta=2, cm_cost=110, pm_cost=23.75,
                      name="main bearing"),
        ComponentSpec(id=3, alpha=80, beta=3, cm_cost=202, pm_cost=46.75,
                      name="gearbox"),
        ComponentSpec(id=4, alpha=110, beta=2, cm_cost=150, pm_cost=33.75,
                      name="generator"),
    )


@pytest.fixture(scope="session")
def gearbox(turbine):
    return turbine[2]


def turbine_config_dict(calendar, replications=20000, seed=2024):
    return {
        "horizon": 240, "lambda": 3.0, "window": 80,
        "components": [
            {"id": 1, "name": "rotor", "alpha": 100, "beta": 3,
             "cm_cost": 162, "pm_cost": 36.75},
            {"id": 2, "name": "main bearing", "alpha": 125, "beta": 2,
             "cm_cost": 110, "pm_cost": 23.75},
            {"id": 3, "name": "gearbox", "alpha": 80, "beta": 3,
             "cm_cost": 202, "pm_cost": 46.75},
            {"id": 4, "name": "generator", "alpha": 110, "beta": 2,
             "cm_cost": 150, "pm_cost": 33.75},
        ],
        "calendar": calendar,
        "mc": {"replications": replications, "seed": seed},
    }


@pytest.fixture(scope="session")
def winter_calendar():
    return SetupCostCalendar.from_pattern(WINTER, 240)


def approx_weibull_mean(alpha, beta, n=200001, upper=8.0):
    """Independent numeric check of alpha * Gamma(1 + 1/beta) by quadrature
    of the survival function."""
    t = np.linspace(0.0, upper * alpha, n)
    surv = np.exp(-((t / alpha) ** beta))
    return float(np.trapezoid(surv, t))
