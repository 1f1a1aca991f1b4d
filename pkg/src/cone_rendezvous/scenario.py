"""Scenario files (JSON) and trace export (CSV)."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema

from .geometry import PlanePoint
from .rendezvous import InvalidProblemError, RendezvousProblem, Vehicle
from .ring_sim import ScenarioConfig, Trace

__all__ = [
    "SCENARIO_SCHEMA",
    "TRACE_HEADER",
    "SCENARIO_DIR_ENV",
    "DeclaredOptimum",
    "ScenarioFile",
    "parse_scenario",
    "emit_scenario",
    "load_scenario",
    "resolve_scenario_path",
    "write_trace_csv",
    "trace_csv_text",
]

SCENARIO_DIR_ENV = "CONE_RENDEZVOUS_SCENARIOS"

TRACE_HEADER = ["interaction", "agent_id", "x", "y", "t", "inc_x", "inc_y", "inc_t", "event", "error_m"]

_number = {"type": "number"}

SCENARIO_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["vehicles", "bregman_periods", "max_interactions", "mode"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "vehicles": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "x", "y", "speed"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 1},
                    "x": _number,
                    "y": _number,
                    "speed": {"type": "number", "exclusiveMinimum": 0},
                },
            },
        },
        "bregman_periods": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "max_interactions": {"type": "integer", "minimum": 1},
        "mode": {"enum": ["synchronous", "asynchronous"]},
        "reset": {"enum": ["leader", "every_agent", "paper_literal"]},
        "paper_case_split": {"type": "boolean"},
        "consensus_window": {"type": "integer", "minimum": 1},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "consensus_m": {"type": "number", "exclusiveMinimum": 0},
                "oracle_m": {"type": "number", "exclusiveMinimum": 0},
                "solver_m": {"type": "number", "minimum": 0},
            },
        },
        "declared_optimum": {
            "type": "object",
            "required": ["x", "y", "time"],
            "additionalProperties": False,
            "properties": {
                "x": _number,
                "y": _number,
                "time": {"type": "number", "minimum": 0},
                "source": {"type": "string"},
            },
        },
    },
}

# schema paths whose violation breaks a modelling assumption
_ASSUMPTION_BY_KEY = {"speed": 1, "x": 1, "y": 1, "id": 3}


@dataclass(frozen=True)
class DeclaredOptimum:
    """An expected rendezvous recorded alongside a scenario, e.g. a published one."""

    point: PlanePoint
    time: float
    source: str = ""


@dataclass(frozen=True)
class ScenarioFile:
    config: ScenarioConfig
    name: str = ""
    description: str = ""
    consensus_window: int = 5
    oracle_tol: float = 1e-4
    solver_tol: float = 1e-6
    declared_optimum: DeclaredOptimum | None = None
    extra: dict = field(default_factory=dict, compare=False, repr=False)


def _field_name(path) -> str:
    name = ""
    for part in path:
        name += f"[{part}]" if isinstance(part, int) else (f".{part}" if name else str(part))
    return name or "<root>"


def _check_schema(data: Any) -> None:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if not errors:
        return
    error = errors[0]
    path = list(error.absolute_path)
    last = path[-1] if path else None
    assumption = _ASSUMPTION_BY_KEY.get(last) if isinstance(last, str) else None
    if error.validator == "required":
        missing = error.message.split("'")[1] if "'" in error.message else ""
        path = path + [missing]
    raise InvalidProblemError(error.message, _field_name(path), assumption)


def parse_scenario(data: dict) -> ScenarioFile:
    """Validate a decoded scenario document and build the config."""
    _check_schema(data)
    try:
        vehicles = tuple(
            Vehicle(v["id"], PlanePoint(float(v["x"]), float(v["y"])), float(v["speed"]))
            for v in data["vehicles"]
        )
    except InvalidProblemError:
        raise
    except ValueError as exc:
        raise InvalidProblemError(str(exc), "vehicles", assumption=1) from exc
    problem = RendezvousProblem(vehicles)
    tolerances = data.get("tolerances", {})
    config = ScenarioConfig(
        problem=problem,
        periods=tuple(data["bregman_periods"]),
        max_interactions=data["max_interactions"],
        mode=data["mode"],
        tol_consensus=float(tolerances.get("consensus_m", 0.5)),
        reset=data.get("reset", "leader"),
        paper_case_split=data.get("paper_case_split", False),
    )
    declared = None
    if "declared_optimum" in data:
        d = data["declared_optimum"]
        declared = DeclaredOptimum(PlanePoint(float(d["x"]), float(d["y"])), float(d["time"]), d.get("source", ""))
    return ScenarioFile(
        config=config,
        name=data.get("name", ""),
        description=data.get("description", ""),
        consensus_window=data.get("consensus_window", 5),
        oracle_tol=float(tolerances.get("oracle_m", 1e-4)),
        solver_tol=float(tolerances.get("solver_m", 1e-6)),
        declared_optimum=declared,
    )


def emit_scenario(scenario: ScenarioFile | ScenarioConfig) -> dict:
    """Inverse of :func:`parse_scenario`."""
    if isinstance(scenario, ScenarioConfig):
        scenario = ScenarioFile(scenario)
    config = scenario.config
    data: dict[str, Any] = {}
    if scenario.name:
        data["name"] = scenario.name
    if scenario.description:
        data["description"] = scenario.description
    data["vehicles"] = [
        {"id": v.id, "x": v.position.x, "y": v.position.y, "speed": v.speed}
        for v in config.problem.vehicles
    ]
    data["bregman_periods"] = list(config.periods)
    data["max_interactions"] = config.max_interactions
    data["mode"] = config.mode.value
    data["reset"] = config.reset.value
    data["paper_case_split"] = config.paper_case_split
    data["consensus_window"] = scenario.consensus_window
    data["tolerances"] = {
        "consensus_m": config.tol_consensus,
        "oracle_m": scenario.oracle_tol,
        "solver_m": scenario.solver_tol,
    }
    if scenario.declared_optimum is not None:
        d = scenario.declared_optimum
        data["declared_optimum"] = {"x": d.point.x, "y": d.point.y, "time": d.time}
        if d.source:
            data["declared_optimum"]["source"] = d.source
    return data


def resolve_scenario_path(path: str | os.PathLike) -> Path:
    """Return ``path``, or the same name under ``$CONE_RENDEZVOUS_SCENARIOS``."""
    candidate = Path(path)
    if candidate.exists() or candidate.is_absolute():
        return candidate
    base = os.environ.get(SCENARIO_DIR_ENV)
    if base:
        for name in (candidate, candidate.with_suffix(".json")):
            alt = Path(base) / name
            if alt.exists():
                return alt
    return candidate


def load_scenario(path: str | os.PathLike) -> ScenarioFile:
    path = resolve_scenario_path(path)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidProblemError(f"cannot read scenario file ({exc.strerror})", str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidProblemError(f"not valid JSON: {exc.msg} at line {exc.lineno}", str(path)) from exc
    return parse_scenario(data)


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _write_rows(trace: Trace, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    for r in trace.records:
        writer.writerow(
            [
                r.interaction,
                r.agent_id,
                _fmt(r.sent.x),
                _fmt(r.sent.y),
                _fmt(r.sent.t),
                _fmt(r.increment.x),
                _fmt(r.increment.y),
                _fmt(r.increment.t),
                r.event,
                _fmt(r.error_to_reference),
            ]
        )


def trace_csv_text(trace: Trace) -> str:
    buffer = io.StringIO()
    _write_rows(trace, buffer)
    return buffer.getvalue()


def write_trace_csv(trace: Trace, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as handle:
        _write_rows(trace, handle)
