"""HTTP service running the rescheduling loop for one live system.

State (current month, per-component last-maintenance times, event history)
persists as JSON under a state directory; mutations are serialized by a
single writer lock and deduplicated by client-supplied request ids, so a
retried POST changes the state once.  Every response embeds the seed and
Monte Carlo settings, making any reported plan reproducible offline.
"""
from __future__ import annotations

import json
import math
import os
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .config import ConfigError, SystemConfig
from .costs import McSettings, SetupCostCalendar
from .scheduler import MaintenanceEvent, SystemState, step_plan, _om_plan_at

STATE_DIR_ENV = "NEXTPM_STATE_DIR"
STATE_FILE = "state.json"


def state_dir_from_env(explicit=None) -> Path:
    if explicit is not None:
        return Path(explicit)
    return Path(os.environ.get(STATE_DIR_ENV, "nextpm-state"))


class FailureReport(BaseModel):
    component: int
    time: float
    request_id: str
    config_hash: str | None = None


class MaintenanceReport(BaseModel):
    components: list[int]
    time: int
    request_id: str
    config_hash: str | None = None


class WhatIfRequest(BaseModel):
    calendar: dict | None = None
    lam: float | None = None

    model_config = {"populate_by_name": True}

    def __init__(self, **data):
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        super().__init__(**data)


class ServiceStore:
    """Mutable single-system store behind the API."""

    def __init__(self, config: SystemConfig, state_dir: Path, reset: bool = False):
        self.config = config
        self.state_dir = Path(state_dir)
        self.lock = threading.Lock()
        self.state = SystemState.fresh(config)
        self.history: list[dict] = []
        self.responses: dict[str, dict] = {}
        self._plan_cache: dict = {}
        path = self.state_dir / STATE_FILE
        if path.exists() and not reset:
            self._load(path)
        else:
            self.save()

    # -- persistence ------------------------------------------------------
    def _load(self, path: Path) -> None:
        with open(path) as fh:
            raw = json.load(fh)
        if raw.get("config_hash") != self.config.hash():
            raise ConfigError(
                [f"state in {path} was produced by a different configuration "
                 f"({raw.get('config_hash')} != {self.config.hash()}); "
                 "move it away or start with a reset"])
        st = raw["state"]
        self.state = SystemState(
            s=st["s"], last_maintenance=tuple(st["last_maintenance"]),
            r=st["r"], horizon=self.config.horizon, window=self.config.window)
        self.history = list(raw.get("history", []))
        self.responses = dict(raw.get("responses", {}))

    def save(self) -> None:
        self.state_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "config_hash": self.config.hash(),
            "state": {"s": self.state.s, "r": self.state.r,
                      "last_maintenance": list(self.state.last_maintenance)},
            "history": self.history,
            "responses": self.responses,
        }
        tmp = self.state_dir / (STATE_FILE + ".tmp")
        with open(tmp, "w") as fh:
            json.dump(payload, fh, indent=2)
        tmp.replace(self.state_dir / STATE_FILE)

    # -- planning ---------------------------------------------------------
    def mc_info(self) -> dict:
        return {"replications": self.config.mc.replications,
                "seed": self.config.mc.seed}

    def state_payload(self) -> dict:
        return {"s": self.state.s, "r": self.state.r,
                "horizon": self.config.horizon,
                "last_maintenance": {
                    str(cid): t for cid, t in zip(self.config.component_ids,
                                                  self.state.last_maintenance)},
                "config_hash": self.config.hash(),
                "mc": self.mc_info()}

    def current_plan(self, config: SystemConfig | None = None) -> dict:
        config = config or self.config
        key = (self.state, config.hash())
        if key not in self._plan_cache:
            tables, plan = step_plan(self.state, config)
            months = [int(t) for t in tables.t_grid]
            summary = []
            for row, cid in enumerate(config.component_ids):
                month = plan.assignment[row]
                col = months.index(month)
                entry = {"component": cid, "month": month,
                         "expected_pm_cost": float(tables.c[row, col])}
                if month <= tables.r:
                    entry["benefit"] = float(tables.D[row, col])
                summary.append(entry)
            self._plan_cache = {key: {
                "tau": plan.tau,
                "set_P": list(plan.set_P),
                "objective": plan.objective,
                "assignment": {str(cid): m for cid, m in
                               zip(plan.component_ids, plan.assignment)},
                "no_pm": plan.tau > tables.r,
                "marginal": [list(m) for m in plan.marginal],
                "summary": summary,
                "window": {"s": tables.s, "r": tables.r},
                "config_hash": config.hash(),
                "mc": {"replications": config.mc.replications,
                       "seed": config.mc.seed},
            }}
        return self._plan_cache[key]

    # -- mutations --------------------------------------------------------
    def check_hash(self, supplied: str | None) -> None:
        if supplied is not None and supplied != self.config.hash():
            raise HTTPException(status_code=409,
                                detail="configuration changed since this "
                                       "client loaded its plan")

    def record_event(self, event: MaintenanceEvent, request_id: str) -> dict:
        entry = event.to_dict()
        entry["request_id"] = request_id
        self.history.append(entry)
        return entry

    def apply_failure(self, report: FailureReport) -> dict:
        cfg = self.config
        if report.component not in cfg.component_ids:
            raise HTTPException(status_code=404,
                                detail=f"unknown component {report.component}")
        plan = self.current_plan()
        tau = plan["tau"]
        if not (self.state.s < report.time <= tau):
            raise HTTPException(
                status_code=422,
                detail=f"failure time must lie in ({self.state.s}, {tau}]")
        row = cfg.component_ids.index(report.component)
        u = max(math.floor(report.time), self.state.s)
        om = _om_plan_at(self.state, cfg, row, u, cfg.mc)
        t = u + 1
        renew = sorted({report.component, *om.set_O},
                       key=cfg.component_ids.index)
        spec = cfg.spec_of(report.component)
        event = MaintenanceEvent(
            time=t, kind="cm", cm_component=report.component,
            pm_components=om.set_O, setup_cost=cfg.calendar.value(t),
            component_cost=spec.cm_cost + sum(cfg.spec_of(j).pm_cost
                                              for j in om.set_O))
        new_last = list(self.state.last_maintenance)
        for cid in renew:
            new_last[cfg.component_ids.index(cid)] = t
        self.state = SystemState(
            s=t, last_maintenance=tuple(new_last),
            r=min(t + self.state.r - self.state.s, cfg.horizon),
            horizon=cfg.horizon, window=self.state.window)
        entry = self.record_event(event, report.request_id)
        self.save()
        return {
            "om": {"set_O": list(om.set_O), "objective": om.objective,
                   "assignment": {str(cid): m for cid, m in
                                  zip(om.component_ids, om.assignment)},
                   "marginal": [list(m) for m in om.marginal]},
            "event": entry,
            "state": self.state_payload(),
            "plan": self.current_plan(),
        }

    def apply_maintenance(self, report: MaintenanceReport) -> dict:
        cfg = self.config
        unknown = [c for c in report.components if c not in cfg.component_ids]
        if unknown:
            raise HTTPException(status_code=404,
                                detail=f"unknown components {unknown}")
        if not (self.state.s < report.time <= cfg.horizon):
            raise HTTPException(
                status_code=422,
                detail=f"maintenance time must lie in ({self.state.s}, "
                       f"{cfg.horizon}]")
        t = report.time
        event = None
        new_last = list(self.state.last_maintenance)
        if report.components:
            event = MaintenanceEvent(
                time=t, kind="pm", cm_component=None,
                pm_components=tuple(report.components),
                setup_cost=cfg.calendar.value(t),
                component_cost=sum(cfg.spec_of(j).pm_cost
                                   for j in report.components))
            for cid in report.components:
                new_last[cfg.component_ids.index(cid)] = t
        self.state = SystemState(
            s=t, last_maintenance=tuple(new_last),
            r=min(t + self.state.r - self.state.s, cfg.horizon),
            horizon=cfg.horizon, window=self.state.window)
        entry = self.record_event(event, report.request_id) if event else None
        self.save()
        return {"event": entry, "state": self.state_payload(),
                "plan": self.current_plan()}

    def whatif(self, req: WhatIfRequest) -> dict:
        cfg = self.config
        calendar = cfg.calendar
        if req.calendar is not None:
            if "constant" in req.calendar:
                calendar = SetupCostCalendar.constant(
                    float(req.calendar["constant"]), cfg.horizon)
            elif "pattern" in req.calendar:
                calendar = SetupCostCalendar.from_pattern(
                    req.calendar["pattern"], cfg.horizon)
            elif "values" in req.calendar:
                calendar = SetupCostCalendar(
                    horizon=cfg.horizon,
                    values=tuple(float(v) for v in req.calendar["values"]))
            else:
                raise HTTPException(status_code=422,
                                    detail="calendar override needs one of "
                                           "constant/pattern/values")
        lam = cfg.lam if req.lam is None else req.lam
        if lam <= 0:
            raise HTTPException(status_code=422, detail="lambda must be > 0")
        try:
            override = SystemConfig(horizon=cfg.horizon, lam=lam,
                                    window=cfg.window,
                                    components=cfg.components,
                                    calendar=calendar, mc=cfg.mc)
        except ConfigError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        saved_cache = self._plan_cache
        self._plan_cache = {}
        try:
            plan = self.current_plan(override)
        finally:
            self._plan_cache = saved_cache
        return {"plan": plan, "baseline": self.current_plan()}


def create_app(config: SystemConfig, state_dir=None, reset: bool = False) -> FastAPI:
    store = ServiceStore(config, state_dir_from_env(state_dir), reset=reset)
    app = FastAPI(title="next-PM planning service")
    app.state.store = store

    def idempotent(request_id: str, fn):
        with store.lock:
            if request_id in store.responses:
                return store.responses[request_id]
            result = fn()
            store.responses[request_id] = result
            store.save()
            return result

    @app.get("/state")
    def get_state():
        return store.state_payload()

    @app.get("/plan")
    def get_plan():
        with store.lock:
            return store.current_plan()

    @app.get("/history")
    def get_history():
        return {"events": store.history, "config_hash": store.config.hash(),
                "mc": store.mc_info()}

    @app.post("/failure")
    def post_failure(report: FailureReport):
        store.check_hash(report.config_hash)
        return idempotent(report.request_id,
                          lambda: store.apply_failure(report))

    @app.post("/maintenance")
    def post_maintenance(report: MaintenanceReport):
        store.check_hash(report.config_hash)
        return idempotent(report.request_id,
                          lambda: store.apply_maintenance(report))

    @app.post("/whatif")
    def post_whatif(req: WhatIfRequest):
        return store.whatif(req)

    return app


def app_from_files(config_path, state_dir=None, reset: bool = False) -> FastAPI:
    from .config import load_config
    raw_config = load_config(config_path)
    return create_app(raw_config, state_dir=state_dir, reset=reset)
