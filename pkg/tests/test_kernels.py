import numpy as np
import pytest

from nextpm import kernels
from nextpm.costs import _simulate_paths
from nextpm.kernels import get_backend
from nextpm.lifetime import ComponentSpec
from nextpm.streams import substream


@pytest.fixture(scope="module")
def backends():
    py = get_backend("python")
    try:
        cy = get_backend("cython")
    except ImportError:
        pytest.skip("compiled backend not built")
    return py, cy


@pytest.fixture(scope="module")
def paths(gearbox):
    rng = substream(11, "kernel-tests")
    return _simulate_paths(gearbox, 12.0, 4.0, 60.0, 55.0, 5000, rng)


def test_backend_name_valid():
    assert kernels.backend_name in ("python", "cython")


def test_pm_g_parity(backends, paths, gearbox):
    py, cy = backends
    prev, lives, fails, _ = paths
    t_grid = np.arange(13.0, 61.0)
    d_ext = np.abs(np.sin(np.arange(200))) * 9 + 1
    for lam in (3.0, 2.5, 1.0):
        a = py.accumulate_pm_g(prev, lives, fails, t_grid, 12.0,
                               gearbox.cm_cost, gearbox.pm_cost, lam, d_ext)
        b = cy.accumulate_pm_g(prev, lives, fails, t_grid, 12.0,
                               gearbox.cm_cost, gearbox.pm_cost, lam, d_ext)
        assert np.array_equal(a, b), f"mismatch at lam={lam}"


def test_horizon_cm_parity(backends, paths, gearbox):
    py, cy = backends
    _, _, fails, fresh = paths
    d_ext = np.linspace(1, 12, 300)
    a = py.accumulate_horizon_cm(fails, 58.0, gearbox.cm_cost, d_ext)
    b = cy.accumulate_horizon_cm(fails, 58.0, gearbox.cm_cost, d_ext)
    assert np.array_equal(a, b)
    t_grid = np.arange(13.0, 31.0)
    a = py.accumulate_shifted_cm(fresh, t_grid, 58.0, gearbox.cm_cost, d_ext)
    b = cy.accumulate_shifted_cm(fresh, t_grid, 58.0, gearbox.cm_cost, d_ext)
    assert np.array_equal(a, b)


def test_python_pm_g_hand_value():
    # one path, one failure: b + d[ceil(f)] - (life/(t-s))^lam (c + d[ceil(p+t-s)])
    py = get_backend("python")
    prev = np.array([[2.0]])
    lives = np.array([[3.0]])
    fails = np.array([[5.0]])
    d_ext = np.arange(20.0)
    out = py.accumulate_pm_g(prev, lives, fails, np.array([9.0]), 2.0,
                             100.0, 40.0, 3.0, d_ext)
    # t - s = 7, discount (3/7)^3, setup at ceil(5)=5 and ceil(2+7)=9
    expect = 100.0 + 5.0 - (3.0 / 7.0) ** 3 * (40.0 + 9.0)
    assert out[0, 0] == pytest.approx(expect)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        get_backend("fortran")
