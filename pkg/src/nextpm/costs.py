"""Monte Carlo expected-cost engine over delayed renewal processes.

Builds the per-component expected PM cost curves c[j][t], the PM benefit
curves D[j][t], renewal functions, and the CM-only baseline rate.

Conventions that matter and are easy to get wrong:

* The failure-cost term for the i-th failure is G(prev, life, t - s) where
  ``prev`` is the PREVIOUS renewal time (the window start s for i = 1) and
  ``life`` the inter-failure time -- not the absolute failure age.
* Set-up costs are defined on integer months 1..T; continuous lookups take
  the ceiling, with d_0 := d_1 at the left boundary.  Beyond T the calendar
  repeats its 12-month pattern when one is given, otherwise holds the last
  value.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .lifetime import ComponentSpec, lives_from_uniforms, moments, residual_total_from_uniforms
from .streams import substream

_MAX_ROUNDS = 500


@dataclass(frozen=True)
class SetupCostCalendar:
    """Time-dependent per-occasion set-up cost d_t, t = 1..horizon."""

    horizon: int
    values: tuple
    pattern: tuple | None = None  # optional 12-month periodic template

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"calendar horizon must be >= 1, got {self.horizon}")
        if len(self.values) != self.horizon:
            raise ValueError(
                f"calendar has {len(self.values)} values but horizon {self.horizon}"
            )
        if any(v < 0 for v in self.values):
            raise ValueError("set-up costs must be >= 0")
        if self.pattern is not None and len(self.pattern) != 12:
            raise ValueError(f"pattern must have 12 entries, got {len(self.pattern)}")

    @classmethod
    def constant(cls, d: float, horizon: int) -> "SetupCostCalendar":
        return cls(horizon=horizon, values=(float(d),) * horizon)

    @classmethod
    def from_pattern(cls, pattern, horizon: int) -> "SetupCostCalendar":
        pattern = tuple(float(v) for v in pattern)
        if len(pattern) != 12:
            raise ValueError(f"pattern must have 12 entries, got {len(pattern)}")
        values = tuple(pattern[(t - 1) % 12] for t in range(1, horizon + 1))
        return cls(horizon=horizon, values=values, pattern=pattern)

    def value(self, t: int) -> float:
        """d_t for integer month t; extends below 1 and above the horizon."""
        if t < 1:
            return self.values[0]
        if t <= self.horizon:
            return self.values[t - 1]
        if self.pattern is not None:
            return self.pattern[(t - 1) % 12]
        return self.values[-1]

    def at(self, x: float) -> float:
        """Continuous-time lookup d_x = d_ceil(x)."""
        return self.value(math.ceil(x))

    def extended(self, upto: int) -> np.ndarray:
        """Array d_ext with d_ext[k] = d_k for k = 0..upto (d_0 = d_1)."""
        return np.array([self.value(k) for k in range(upto + 1)])

    def mean(self) -> float:
        return float(np.mean(self.values))


@dataclass(frozen=True)
class McSettings:
    replications: int = 100_000
    seed: int = 0
    stderr_target: float | None = None  # advisory, kUSD

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")


@dataclass(frozen=True)
class CostTables:
    """Expected PM costs and PM benefits for one planning window.

    ``c`` has one column per month in [s+1, r+1]; ``D`` drops the deferral
    column r+1.  Row order matches ``component_ids``.
    """

    s: int
    r: int
    component_ids: tuple
    c: np.ndarray          # (n, r - s + 1)
    c_stderr: np.ndarray
    D: np.ndarray          # (n, r - s)
    D_stderr: np.ndarray
    settings: McSettings

    @property
    def t_grid(self) -> np.ndarray:
        return np.arange(self.s + 1, self.r + 2)

    def _col(self, t: int) -> int:
        if not self.s + 1 <= t <= self.r + 1:
            raise ValueError(f"t={t} outside table window [{self.s + 1}, {self.r + 1}]")
        return t - self.s - 1

    def _row(self, component_id: int) -> int:
        return self.component_ids.index(component_id)

    def c_of(self, component_id: int, t: int) -> float:
        return float(self.c[self._row(component_id), self._col(t)])

    def d_of(self, component_id: int, t: int) -> float:
        if t > self.r:
            raise ValueError(f"D is not defined at the deferral slot t={t}")
        return float(self.D[self._row(component_id), self._col(t)])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["j", "t", "c", "c_stderr", "D", "D_stderr"])
            for row, j in enumerate(self.component_ids):
                for col, t in enumerate(self.t_grid):
                    has_d = t <= self.r
                    w.writerow([
                        j, int(t),
                        repr(float(self.c[row, col])), repr(float(self.c_stderr[row, col])),
                        repr(float(self.D[row, col])) if has_d else "",
                        repr(float(self.D_stderr[row, col])) if has_d else "",
                    ])


def failure_cost_G(spec: ComponentSpec, calendar: SetupCostCalendar, lam: float,
                   s: float, u: float, t: float) -> float:
    """Additional cost of a failure u time units into a window of length t.

    G(s, u, t) = b + d_{s+u} - (u/t)^lam * (c + d_{s+t}).
    """
    if lam <= 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t}")
    if not 0 <= u <= t:
        raise ValueError(f"u={u} outside [0, t={t}]")
    return (spec.cm_cost + calendar.at(s + u)
            - (u / t) ** lam * (spec.pm_cost + calendar.at(s + t)))


def _simulate_paths(spec: ComponentSpec, s: float, t_j: float,
                    horizon: float, fresh_horizon: float,
                    reps: int, rng: np.random.Generator):
    """Simulate delayed renewal paths from state (s, t_j), plus an optional
    coupled zero-delay process (common random numbers).

    Returns (prev, lives, fails, fresh_fails); fresh_fails is None when
    fresh_horizon < 0.  All arrays are (reps, k) with k the number of renewal
    rounds needed for every path to clear its horizon.
    """
    age = s - t_j
    if age < 0:
        raise ValueError(f"last maintenance {t_j} after current time {s}")
    track_fresh = fresh_horizon >= 0

    u = rng.random(reps)
    life = residual_total_from_uniforms(spec, age, u)
    fail = t_j + life
    prev_cols = [np.full(reps, float(s))]
    live_cols = [life]
    fail_cols = [fail]
    fresh_cols = None
    fresh = None
    if track_fresh:
        fresh = lives_from_uniforms(spec, u)
        fresh_cols = [fresh]

    rounds = 0
    while fail.min() <= horizon or (track_fresh and fresh.min() <= fresh_horizon):
        rounds += 1
        if rounds > _MAX_ROUNDS:
            raise RuntimeError("renewal path simulation exceeded the round cap")
        u = rng.random(reps)
        life = lives_from_uniforms(spec, u)
        prev_cols.append(fail)
        fail = fail + life
        live_cols.append(life)
        fail_cols.append(fail)
        if track_fresh:
            fresh = fresh + life
            fresh_cols.append(fresh)

    def pack(cols):
        return np.ascontiguousarray(np.column_stack(cols))

    return (pack(prev_cols), pack(live_cols), pack(fail_cols),
            pack(fresh_cols) if track_fresh else None)


def _curves(spec: ComponentSpec, calendar: SetupCostCalendar, lam: float,
            s: float, t_j: float, t_grid_c: np.ndarray,
            t_grid_D: np.ndarray | None, T: int,
            reps: int, rng: np.random.Generator):
    """Per-replication cost accumulations for a grid of candidate PM months.

    Returns (c_rep, D_rep): arrays (reps, len(grid)); D_rep is None when no
    benefit grid is requested.  The same delayed paths feed both the expected
    PM cost and the no-PM branch of the benefit, and the post-PM fresh process
    reuses the same uniforms, so the benefit is a low-variance difference.
    """
    t_grid_c = np.asarray(t_grid_c, dtype=np.float64)
    with_D = t_grid_D is not None and len(t_grid_D) > 0
    horizon = float(t_grid_c.max())
    fresh_horizon = -1.0
    if with_D:
        t_grid_D = np.asarray(t_grid_D, dtype=np.float64)
        horizon = max(horizon, float(T))
        fresh_horizon = float(T) - float(t_grid_D.min())

    prev, lives, fails, fresh = _simulate_paths(
        spec, s, t_j, horizon, fresh_horizon, reps, rng)

    d_ext = calendar.extended(int(2 * max(horizon, t_grid_c.max())) + 3)
    acc = kernels.accumulate_pm_g(prev, lives, fails, t_grid_c, float(s),
                                  spec.cm_cost, spec.pm_cost, float(lam), d_ext)
    c_rep = spec.pm_cost + acc

    D_rep = None
    if with_D:
        nopm = kernels.accumulate_horizon_cm(fails, float(T), spec.cm_cost, d_ext)
        after = kernels.accumulate_shifted_cm(fresh, t_grid_D, float(T),
                                              spec.cm_cost, d_ext)
        nD = len(t_grid_D)
        D_rep = nopm[:, None] - c_rep[:, :nD] - after
    return c_rep, D_rep


def _mean_stderr(rep_values: np.ndarray):
    mean = rep_values.mean(axis=0)
    n = rep_values.shape[0]
    if n > 1:
        stderr = rep_values.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        stderr = np.zeros_like(mean)
    return mean, stderr


_CHUNK = 100_000


def _curve_stats(spec, calendar, lam, s, t_j, t_grid_c, t_grid_D, T, reps, rng):
    """Chunked mean/stderr of `_curves`, bounding peak memory at large
    replication counts.  Chunk size is fixed so results are reproducible."""
    with_D = t_grid_D is not None and len(t_grid_D) > 0
    nc = len(t_grid_c)
    nD = len(t_grid_D) if with_D else 0
    c_sum = np.zeros(nc)
    c_sq = np.zeros(nc)
    D_sum = np.zeros(nD)
    D_sq = np.zeros(nD)
    done = 0
    while done < reps:
        m = min(_CHUNK, reps - done)
        c_rep, D_rep = _curves(spec, calendar, lam, s, t_j, t_grid_c,
                               t_grid_D, T, m, rng)
        c_sum += c_rep.sum(axis=0)
        c_sq += (c_rep * c_rep).sum(axis=0)
        if with_D:
            D_sum += D_rep.sum(axis=0)
            D_sq += (D_rep * D_rep).sum(axis=0)
        done += m

    def finish(total, total_sq):
        mean = total / reps
        if reps > 1:
            var = np.maximum(total_sq - reps * mean * mean, 0.0) / (reps - 1)
            stderr = np.sqrt(var / reps)
        else:
            stderr = np.zeros_like(mean)
        return mean, stderr

    c_mean, c_se = finish(c_sum, c_sq)
    if with_D:
        D_mean, D_se = finish(D_sum, D_sq)
    else:
        D_mean = D_se = None
    return c_mean, c_se, D_mean, D_se


def expected_pm_cost(spec: ComponentSpec, calendar: SetupCostCalendar, lam: float,
                     s: int, t_j: float, t: int, settings: McSettings):
    """Monte Carlo estimate of the expected PM cost c_{s,t} for one month.

    Returns (estimate, standard error).
    """
    if t <= s:
        raise ValueError(f"target month t={t} must exceed the current time s={s}")
    if t > calendar.horizon + 1:
        raise ValueError(f"t={t} beyond the deferral slot T+1={calendar.horizon + 1}")
    rng = substream(settings.seed, "pm-cost", spec.id, s, t_j, t)
    c_mean, c_se, _, _ = _curve_stats(spec, calendar, lam, s, t_j,
                                      np.array([t], dtype=np.float64), None,
                                      calendar.horizon, settings.replications, rng)
    return float(c_mean[0]), float(c_se[0])


def pm_benefit_D(spec: ComponentSpec, calendar: SetupCostCalendar, lam: float,
                 s: int, t_j: float, t: int, T: int, settings: McSettings):
    """Monte Carlo estimate of the PM benefit D_{s,t}; (estimate, stderr)."""
    if t > T:
        raise ValueError(f"benefit undefined beyond the horizon: t={t} > T={T}")
    if t <= s:
        raise ValueError(f"target month t={t} must exceed the current time s={s}")
    rng = substream(settings.seed, "benefit", spec.id, s, t_j, t)
    grid = np.array([t], dtype=np.float64)
    _, _, D_mean, D_se = _curve_stats(spec, calendar, lam, s, t_j, grid, grid,
                                      T, settings.replications, rng)
    return float(D_mean[0]), float(D_se[0])


def build_cost_tables(components, calendar: SetupCostCalendar, lam: float,
                      s: int, last_maintenance, r: int, T: int,
                      settings: McSettings) -> CostTables:
    """Fill c[j][t] for t in [s+1, r+1] and D[j][t] for t in [s+1, r].

    One stream per component, keyed by (seed, component id, s); all months of
    a component share its simulated paths, which both cuts the work per table
    by the window length and smooths the cost curve across adjacent months.
    """
    components = list(components)
    last_maintenance = list(last_maintenance)
    if len(last_maintenance) != len(components):
        raise ValueError("one last-maintenance time per component required")
    if not (s < r + 1 <= T + 1):
        raise ValueError(f"need s < r+1 <= T+1, got s={s}, r={r}, T={T}")
    if r < s + 1:
        raise ValueError(f"window end r={r} must be at least s+1={s + 1}")
    for spec, t_j in zip(components, last_maintenance):
        if not 0 <= t_j <= s:
            raise ValueError(
                f"component {spec.id}: last maintenance {t_j} outside [0, {s}]")

    t_grid_c = np.arange(s + 1, r + 2, dtype=np.float64)
    t_grid_D = np.arange(s + 1, r + 1, dtype=np.float64)
    n, nt = len(components), len(t_grid_c)
    c = np.zeros((n, nt))
    c_stderr = np.zeros((n, nt))
    D = np.zeros((n, nt - 1))
    D_stderr = np.zeros((n, nt - 1))
    for row, (spec, t_j) in enumerate(zip(components, last_maintenance)):
        rng = substream(settings.seed, "tables", spec.id, s)
        c[row], c_stderr[row], D[row], D_stderr[row] = _curve_stats(
            spec, calendar, lam, s, t_j, t_grid_c, t_grid_D, T,
            settings.replications, rng)
    return CostTables(
        s=s, r=r, component_ids=tuple(spec.id for spec in components),
        c=c, c_stderr=c_stderr, D=D, D_stderr=D_stderr, settings=settings)


def renewal_function(spec: ComponentSpec, t: float, settings: McSettings):
    """Expected number of renewals in [0, t] for a zero-delay process.

    Returns (estimate, standard error).
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    rng = substream(settings.seed, "renewal", spec.id, t)
    _, _, fails, _ = _simulate_paths(spec, 0.0, 0.0, float(t), -1.0,
                                     settings.replications, rng)
    counts = kernels.accumulate_horizon_cm(fails, float(t), 1.0, np.zeros(1))
    mean, stderr = _mean_stderr(counts[:, None])
    return float(mean[0]), float(stderr[0])


def cm_only_rate(components, calendar: SetupCostCalendar) -> float:
    """Renewal-theory approximation of the monthly cost of repairing on
    failure only: sum over components of (mean set-up + CM cost) / mean life."""
    d_bar = calendar.mean()
    return float(sum((d_bar + spec.cm_cost) / moments(spec).mean
                     for spec in components))
