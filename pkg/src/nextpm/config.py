"""System configuration: JSON ingestion and validation.

Schema (see README for the full description):

    {
      "horizon": 240,
      "lambda": 3.0,
      "window": 80,
      "components": [
        {"id": 1, "name": "rotor", "alpha": 100, "beta": 3,
         "cm_cost": 162, "pm_cost": 36.75},
        ...
      ],
      "calendar": {"constant": 10}
                | {"pattern": [12 monthly values]}
                | {"values": [T values]},
      "mc": {"replications": 100000, "seed": 2024}
    }
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .costs import McSettings, SetupCostCalendar
from .lifetime import ComponentSpec


class ConfigError(ValueError):
    """Invalid configuration; collects every violation found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(self.problems))


@dataclass(frozen=True)
class SystemConfig:
    horizon: int                   # T, months
    lam: float                     # failure-cost shape exponent
    window: int                    # planning window length r - s
    components: tuple              # ComponentSpec, ordered
    calendar: SetupCostCalendar
    mc: McSettings

    def __post_init__(self):
        problems = []
        if self.horizon < 1:
            problems.append(f"horizon must be >= 1, got {self.horizon}")
        if self.lam <= 0:
            problems.append(f"lambda must be > 0, got {self.lam}")
        if self.window < 1:
            problems.append(f"window must be >= 1, got {self.window}")
        if not self.components:
            problems.append("at least one component required")
        if self.calendar.horizon != self.horizon:
            problems.append(
                f"calendar covers {self.calendar.horizon} months, horizon is {self.horizon}")
        ids = [spec.id for spec in self.components]
        if len(set(ids)) != len(ids):
            problems.append(f"component ids must be unique, got {ids}")
        if problems:
            raise ConfigError(problems)

    @property
    def component_ids(self) -> tuple:
        return tuple(spec.id for spec in self.components)

    def spec_of(self, component_id: int) -> ComponentSpec:
        for spec in self.components:
            if spec.id == component_id:
                return spec
        raise KeyError(f"unknown component {component_id}")

    def to_dict(self) -> dict:
        cal: dict = {}
        if self.calendar.pattern is not None:
            cal["pattern"] = list(self.calendar.pattern)
        elif len(set(self.calendar.values)) == 1:
            cal["constant"] = self.calendar.values[0]
        else:
            cal["values"] = list(self.calendar.values)
        return {
            "horizon": self.horizon,
            "lambda": self.lam,
            "window": self.window,
            "components": [
                {"id": s.id, "name": s.name, "alpha": s.alpha, "beta": s.beta,
                 "cm_cost": s.cm_cost, "pm_cost": s.pm_cost}
                for s in self.components
            ],
            "calendar": cal,
            "mc": {"replications": self.mc.replications, "seed": self.mc.seed},
        }

    def hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def _require(obj: dict, key: str, kind, problems: list, where: str):
    if key not in obj:
        problems.append(f"{where}: missing field {key!r}")
        return None
    value = obj[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        problems.append(f"{where}.{key}: expected {kind.__name__}, got {value!r}")
        return None
    return value


def config_from_dict(raw: dict) -> SystemConfig:
    problems: list[str] = []
    horizon = _require(raw, "horizon", int, problems, "config")
    lam = _require(raw, "lambda", float, problems, "config")
    window = _require(raw, "window", int, problems, "config")
    # range checks here so they are reported alongside any field problems
    if horizon is not None and horizon < 1:
        problems.append(f"config.horizon: must be >= 1, got {horizon}")
        horizon = None
    if lam is not None and lam <= 0:
        problems.append(f"config.lambda: must be > 0, got {lam}")
    if window is not None and window < 1:
        problems.append(f"config.window: must be >= 1, got {window}")

    components = []
    raw_components = raw.get("components")
    if not isinstance(raw_components, list) or not raw_components:
        problems.append("config.components: expected a non-empty list")
        raw_components = []
    for idx, rc in enumerate(raw_components):
        where = f"components[{idx}]"
        cid = _require(rc, "id", int, problems, where)
        alpha = _require(rc, "alpha", float, problems, where)
        beta = _require(rc, "beta", float, problems, where)
        cm = _require(rc, "cm_cost", float, problems, where)
        pm = _require(rc, "pm_cost", float, problems, where)
        if None in (cid, alpha, beta, cm, pm):
            continue
        try:
            components.append(ComponentSpec(
                id=cid, alpha=alpha, beta=beta, cm_cost=cm, pm_cost=pm,
                name=rc.get("name", "")))
        except ValueError as exc:
            problems.append(f"{where}: {exc}")

    calendar = None
    raw_cal = raw.get("calendar")
    if not isinstance(raw_cal, dict):
        problems.append("config.calendar: expected an object")
    elif horizon is not None:
        try:
            if "constant" in raw_cal:
                calendar = SetupCostCalendar.constant(float(raw_cal["constant"]), horizon)
            elif "pattern" in raw_cal:
                calendar = SetupCostCalendar.from_pattern(raw_cal["pattern"], horizon)
            elif "values" in raw_cal:
                calendar = SetupCostCalendar(
                    horizon=horizon, values=tuple(float(v) for v in raw_cal["values"]))
            else:
                problems.append("config.calendar: one of constant/pattern/values required")
        except ValueError as exc:
            problems.append(f"config.calendar: {exc}")

    mc = McSettings()
    raw_mc = raw.get("mc", {})
    if isinstance(raw_mc, dict):
        try:
            mc = McSettings(
                replications=raw_mc.get("replications", McSettings.replications),
                seed=raw_mc.get("seed", McSettings.seed))
        except ValueError as exc:
            problems.append(f"config.mc: {exc}")
    else:
        problems.append("config.mc: expected an object")

    if problems:
        raise ConfigError(problems)
    try:
        return SystemConfig(horizon=horizon, lam=lam, window=window,
                            components=tuple(components), calendar=calendar, mc=mc)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError([str(exc)])


def load_config(path) -> SystemConfig:
    """Parse and validate a JSON configuration file."""
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"])
    if not isinstance(raw, dict):
        raise ConfigError([f"{path}: top level must be an object"])
    return config_from_dict(raw)
