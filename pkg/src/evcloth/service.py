"""Local HTTP facade over simulation, device control, session flow and analysis.

State model: one simulated driver and a set of in-memory sessions, each
persisted to a JSONL file in the data directory as it progresses. All
mutations go through a per-process lock so concurrent HTTP handling cannot
interleave a session step with a device transition.

Binding defaults to loopback; the CLI requires an explicit flag to expose
the service externally.
"""

from __future__ import annotations

import math
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import device, experiment, physics, stats
from .drivechain import PulseConfig, synthesize_square


@dataclass
class ServiceConfig:
    data_dir: Path = Path("./sessions")
    stack: physics.MaterialStack = physics.MaterialStack()
    series_resistance: float = 1e6
    rise_time: float = 1e-3
    static_dir: Path | None = None


@dataclass
class ApiSession:
    id: str
    log: experiment.SessionLog
    transcript: list[str] = field(default_factory=list)

    @property
    def cursor(self) -> int:
        return len(self.log.responses)

    @property
    def complete(self) -> bool:
        return self.log.complete and self.log.distinct_sensation_count is not None


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _condition_payload(cond: experiment.Condition, blinded: bool) -> dict[str, Any]:
    if blinded:
        return {"label": "condition", "baseline_hint_hidden": True}
    return {
        "label": cond.label(),
        "baseline": cond.is_baseline,
        "voltage": cond.voltage,
        "frequency": cond.frequency,
    }


def interlock_commands(cond: experiment.Condition) -> list[str]:
    """Driver command sequence that realizes a condition."""
    if cond.is_baseline:
        return ["OFF"]
    return [f"SET V {cond.voltage:g}", f"SET F {cond.frequency:g}", "ON"]


class ServiceState:
    """Owns the device state machine and the session store."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.lock = threading.Lock()
        self.sessions: dict[str, ApiSession] = {}
        limits = device.DriverLimits(
            stack=config.stack,
            series_resistance=config.series_resistance,
            rise_time=config.rise_time,
        )
        self.device_state = device.DeviceState(limits=limits)
        config.data_dir.mkdir(parents=True, exist_ok=True)

    # -- device ------------------------------------------------------------

    def device_line(self, line: str, transcript: list[str] | None = None) -> str:
        self.device_state, response = device.handle_line(self.device_state, line)
        if transcript is not None:
            transcript.append(f"{line} -> {response}")
        return response

    def activate(self, session: ApiSession, cond: experiment.Condition) -> None:
        """Drive the device into the given condition; raise 502 on any ERR."""
        saved = self.device_state
        for line in interlock_commands(cond):
            response = self.device_line(line, session.transcript)
            if response.startswith("ERR"):
                self.device_state = saved
                raise ApiError(502, response, f"device rejected {line!r}: {response}")

    # -- sessions ----------------------------------------------------------

    def create_session(self, participant_id: str, seed: int) -> ApiSession:
        plan = experiment.plan_session(participant_id, seed)
        session = ApiSession(id=str(uuid.uuid4()), log=experiment.SessionLog(plan=plan))
        self.activate(session, plan.order[0])
        self.sessions[session.id] = session
        self._persist(session)
        return session

    def get_session(self, session_id: str) -> ApiSession:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise ApiError(404, "NOT_FOUND", f"unknown session {session_id}") from None

    def submit_response(self, session: ApiSession, rec: experiment.ResponseRecord) -> None:
        if session.log.complete:
            raise ApiError(409, "COMPLETE", "session already has all responses")
        current = session.log.plan.order[session.cursor]
        if rec.condition != current:
            if session.log.answered(rec.condition):
                raise ApiError(409, "DuplicateResponse", "condition already answered")
            raise ApiError(
                422,
                "OUT_OF_STEP",
                f"expected response for {current.label()}, got {rec.condition.label()}",
            )
        new_log = experiment.record_response(session.log, rec)
        # Advance the driver before committing so a device fault leaves the
        # cursor untouched.
        if len(new_log.responses) < len(new_log.plan.order):
            next_cond = new_log.plan.order[len(new_log.responses)]
            self.activate(session, next_cond)
        else:
            response = self.device_line("OFF", session.transcript)
            if response.startswith("ERR"):
                raise ApiError(502, response, "device rejected OFF")
        session.log = new_log
        self._persist(session)

    def _persist(self, session: ApiSession) -> None:
        experiment.save_session(
            session.log, self.config.data_dir / f"{session.id}.jsonl"
        )


def _validation(exc: Exception) -> ApiError:
    if isinstance(exc, experiment.DuplicateResponse):
        return ApiError(409, "DuplicateResponse", str(exc))
    return ApiError(422, "VALIDATION", str(exc))


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    state = ServiceState(config)
    app = FastAPI(title="evcloth service")
    app.state.service = state

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"error": exc.code, "message": exc.message}
        )

    @app.get("/api/conditions")
    def conditions():
        return [
            _condition_payload(c, blinded=False)
            for c in experiment.build_condition_grid()
        ]

    @app.post("/api/sessions", status_code=201)
    def create_session(body: dict):
        with state.lock:
            try:
                session = state.create_session(
                    str(body.get("participant_id", "")), int(body.get("seed", 0))
                )
            except experiment.ExperimentError as exc:
                raise _validation(exc)
            return {
                "id": session.id,
                "participant_id": session.log.plan.participant_id,
                "seed": session.log.plan.seed,
                "order": [c.label() for c in session.log.plan.order],
                "cursor": session.cursor,
            }

    @app.get("/api/sessions/{session_id}/next")
    def next_condition(session_id: str, view: str = Query("participant")):
        with state.lock:
            session = state.get_session(session_id)
            if session.log.complete:
                return {
                    "done": True,
                    "cursor": session.cursor,
                    "needs_distinct_count": session.log.distinct_sensation_count is None,
                }
            cond = session.log.plan.order[session.cursor]
            return {
                "done": False,
                "cursor": session.cursor,
                "total": len(session.log.plan.order),
                "condition": _condition_payload(cond, blinded=view != "experimenter"),
            }

    @app.post("/api/sessions/{session_id}/responses", status_code=201)
    def submit_response(session_id: str, body: dict):
        with state.lock:
            session = state.get_session(session_id)
            try:
                rec = experiment.ResponseRecord(
                    condition=experiment.Condition.from_json(body["condition"]),
                    likert={k: int(v) for k, v in body["likert"].items()},
                    acceptable=bool(body["acceptable"]),
                    free_text=str(body.get("free_text", "")),
                    similar_fabric=int(body["similar_fabric"]),
                    timestamp=str(
                        body.get("timestamp")
                        or datetime.now(timezone.utc).isoformat()
                    ),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise _validation(
                    exc if isinstance(exc, ValueError) else ValueError(str(exc))
                )
            state.submit_response(session, rec)
            return {"cursor": session.cursor, "complete": session.log.complete}

    @app.post("/api/sessions/{session_id}/distinct")
    def distinct(session_id: str, body: dict):
        with state.lock:
            session = state.get_session(session_id)
            if not session.log.complete:
                raise ApiError(422, "INCOMPLETE", "all responses required first")
            try:
                session.log = experiment.set_distinct_count(
                    session.log, int(body["count"])
                )
            except (KeyError, ValueError) as exc:
                raise _validation(
                    exc if isinstance(exc, ValueError) else ValueError(str(exc))
                )
            state._persist(session)
            return {"complete": True}

    @app.get("/api/sessions/{session_id}/export")
    def export_session(session_id: str):
        with state.lock:
            session = state.get_session(session_id)
            return PlainTextResponse(
                experiment.session_to_jsonl(session.log),
                media_type="application/jsonl",
            )

    @app.get("/api/sessions/{session_id}/transcript")
    def transcript(session_id: str):
        with state.lock:
            session = state.get_session(session_id)
            return {"transcript": list(session.transcript)}

    @app.get("/api/trace")
    def trace(
        v: float = Query(..., ge=0),
        f: float = Query(...),
        ms: float = Query(100.0, gt=0),
        format: str = Query("json"),
    ):
        if v > device.DriverLimits().max_voltage:
            raise ApiError(422, "RANGE", f"voltage {v} exceeds the driver limit")
        try:
            cfg = PulseConfig(
                frequency=f,
                sample_rate=max(20_000.0, 20 * f),
                duration=ms / 1000.0,
            )
            waveform = synthesize_square(cfg, v)
            tr = physics.friction_trace(config.stack, waveform)
        except ValueError as exc:
            raise _validation(exc)
        metrics = physics.modulation_metrics(tr)
        if format == "csv":
            return PlainTextResponse(physics.trace_to_csv(tr), media_type="text/csv")
        return {
            "sample_rate": tr.sample_rate,
            "t_s": [i / tr.sample_rate for i in range(len(tr))],
            "voltage_v": list(tr.voltage),
            "friction_n": list(tr.friction_force),
            "normal_n": list(tr.normal_force),
            "metrics": metrics,
        }

    @app.post("/api/device/command")
    def device_command(body: dict):
        with state.lock:
            line = str(body.get("line", ""))
            return {"response": state.device_line(line)}

    @app.get("/api/sessions/{session_id}/analysis")
    def analysis(session_id: str):
        with state.lock:
            state.get_session(session_id)  # 404 if unknown
            completed = [s.log for s in state.sessions.values() if s.complete]
            if len(completed) < 2:
                raise ApiError(
                    422,
                    "INSUFFICIENT_DATA",
                    f"analysis needs >= 2 complete sessions, have {len(completed)}",
                )
            results = {
                prop: stats.art_anova(observations_from_logs(completed, prop))
                for prop in experiment.LIKERT_PROPERTIES
            }
            accept = experiment.acceptability_summary(completed)
            means = experiment.likert_condition_means(completed)
            return {
                "anova": {
                    prop: [
                        {
                            "term": row.term.value,
                            "df1": row.df_num,
                            "df2": row.df_den,
                            # Degenerate zero-error fixtures give F = inf,
                            # which JSON cannot carry.
                            "F": row.f_stat if math.isfinite(row.f_stat) else None,
                            "p": row.p_value,
                        }
                        for row in rows
                    ]
                    for prop, rows in results.items()
                },
                "acceptability": {c.label(): frac for c, frac in accept.items()},
                "likert_means": {
                    c.label(): vals for c, vals in means.items()
                },
            }

    if config.static_dir is not None and config.static_dir.is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="console")

    return app


def observations_from_logs(
    logs: list[experiment.SessionLog], prop: str
) -> list[stats.FactorialObservation]:
    """Energized responses of complete sessions as a factorial dataset."""
    obs = []
    for log in logs:
        for r in log.responses:
            if not r.condition.is_baseline:
                obs.append(
                    stats.FactorialObservation(
                        subject=log.plan.participant_id,
                        level_a=f"{r.condition.voltage:g}",
                        level_b=f"{r.condition.frequency:g}",
                        response=float(r.likert[prop]),
                    )
                )
    return obs
