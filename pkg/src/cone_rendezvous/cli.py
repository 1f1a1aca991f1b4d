"""Command-line entry point: ``cone-rendezvous {oracle,solve,simulate}``.

Exit codes: 0 success, 2 invalid scenario, 3 solver or protocol did not
converge.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from typing import Any

from .geometry import PlanePoint, project_cone_paper
from .projections import centralized_min_time
from .rendezvous import InvalidProblemError, RendezvousProblem, active_vehicles, objective, oracle_solve
from .ring_sim import ResetMode, consensus_estimate, run_ring
from .scenario import ScenarioFile, load_scenario, write_trace_csv

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3

# declared optimum counts as consistent if its objective matches within this
DECLARED_TIME_TOL_S = 1e-3


def _point(p: PlanePoint) -> dict[str, float]:
    return {"x_m": p.x, "y_m": p.y}


def _times(problem: RendezvousProblem, p: PlanePoint) -> dict[str, float]:
    return {str(v.id): t for v, t in zip(problem.vehicles, problem.travel_times(p))}


@dataclass
class RunReport:
    """Everything one command learned, with units in every numeric key."""

    command: str
    scenario: str
    sections: dict[str, dict[str, Any]] = field(default_factory=dict)
    flags: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def add_solution(self, key: str, problem: RendezvousProblem, p: PlanePoint, time: float, **extra) -> None:
        self.sections[key] = {
            "point": _point(p),
            "time_s": time,
            "objective_at_point_s": objective(problem, p),
            "travel_times_s": _times(problem, p),
            **extra,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "scenario": self.scenario,
            **self.sections,
            "flags": self.flags,
            "warnings": self.warnings,
        }

    def render(self) -> str:
        lines = [f"[{self.command}] {self.scenario}"]
        for key, section in self.sections.items():
            if "point" in section:
                p = section["point"]
                lines.append(
                    f"  {key:<10} point ({p['x_m']:.4f} m, {p['y_m']:.4f} m)  time {section['time_s']:.4f} s"
                    f"  objective {section['objective_at_point_s']:.4f} s"
                )
            for name, value in section.items():
                if name in ("point", "time_s", "objective_at_point_s"):
                    continue
                if name == "travel_times_s":
                    times = ", ".join(f"{i}: {t:.4f} s" for i, t in value.items())
                    lines.append(f"  {'':<10} travel times {times}")
                else:
                    lines.append(f"  {'':<10} {name} = {_render_value(value)}")
        for name, value in self.flags.items():
            lines.append(f"  flag {name} = {value}")
        for warning in self.warnings:
            lines.append(f"  WARNING: {warning}")
        return "\n".join(lines)


def _render_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, dict):
        return ", ".join(f"{k}: {_render_value(v)}" for k, v in value.items())
    return str(value)


def _oracle_section(report: RunReport, scenario: ScenarioFile, tol: float) -> tuple[PlanePoint, float]:
    problem = scenario.config.problem
    point, time = oracle_solve(problem, tol)
    active = sorted(active_vehicles(problem, point, time, tol=1e-3))
    report.add_solution("oracle", problem, point, time, active_vehicles=active, tol_m=tol)
    return point, time


def _declared_section(report: RunReport, scenario: ScenarioFile, oracle_point: PlanePoint, oracle_time: float) -> None:
    declared = scenario.declared_optimum
    if declared is None:
        return
    problem = scenario.config.problem
    evaluated = objective(problem, declared.point)
    consistent = abs(evaluated - declared.time) <= DECLARED_TIME_TOL_S
    report.add_solution(
        "declared",
        problem,
        declared.point,
        declared.time,
        consistent_with_objective=consistent,
        distance_to_oracle_m=declared.point.distance_to(oracle_point),
        time_minus_oracle_s=declared.time - oracle_time,
        source=declared.source,
    )
    if not consistent:
        report.warnings.append(
            f"declared optimum ({declared.point.x:g} m, {declared.point.y:g} m) / {declared.time:g} s "
            f"is inconsistent with the min-max objective, which evaluates to {evaluated:.4f} s there; "
            f"oracle optimum is ({oracle_point.x:.4f} m, {oracle_point.y:.4f} m) / {oracle_time:.4f} s"
        )


def cmd_oracle(args: argparse.Namespace) -> tuple[RunReport, int]:
    scenario = load_scenario(args.scenario)
    report = RunReport("oracle", args.scenario)
    tol = args.tol if args.tol is not None else scenario.oracle_tol
    point, time = _oracle_section(report, scenario, tol)
    _declared_section(report, scenario, point, time)
    return report, EXIT_OK


def cmd_solve(args: argparse.Namespace) -> tuple[RunReport, int]:
    scenario = load_scenario(args.scenario)
    problem = scenario.config.problem
    report = RunReport("solve", args.scenario)
    oracle_point, oracle_time = _oracle_section(report, scenario, scenario.oracle_tol)
    _declared_section(report, scenario, oracle_point, oracle_time)

    tol = args.tol if args.tol is not None else scenario.solver_tol
    result = centralized_min_time(
        problem,
        dykstra_cycles_per_step=args.dykstra_cycles,
        max_bregman_steps=args.max_steps,
        tol=tol,
        cone_projection=project_cone_paper if args.paper_case_split else None,
    )
    report.add_solution(
        "algorithm",
        problem,
        result.point,
        result.time,
        converged=result.converged,
        bregman_steps=result.bregman_steps,
        distance_to_oracle_m=result.point.distance_to(oracle_point),
        time_minus_oracle_s=result.time - oracle_time,
    )
    report.flags.update(
        dykstra_cycles=args.dykstra_cycles,
        max_steps=args.max_steps,
        tol_m=tol,
        paper_case_split=args.paper_case_split,
    )
    return report, EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_simulate(args: argparse.Namespace) -> tuple[RunReport, int]:
    scenario = load_scenario(args.scenario)
    config = scenario.config
    overrides: dict[str, Any] = {}
    if args.paper_literal_reset:
        overrides["reset"] = ResetMode.PAPER_LITERAL
    elif args.reset is not None:
        overrides["reset"] = ResetMode(args.reset)
    if args.paper_case_split:
        overrides["paper_case_split"] = True
    if args.max_interactions is not None:
        overrides["max_interactions"] = args.max_interactions
    if overrides:
        config = replace(config, **overrides)
    problem = config.problem

    report = RunReport("simulate", args.scenario)
    oracle_point, oracle_time = _oracle_section(report, scenario, scenario.oracle_tol)
    _declared_section(report, scenario, oracle_point, oracle_time)

    if args.reference == "declared":
        if scenario.declared_optimum is None:
            raise InvalidProblemError("--reference declared needs a declared optimum", "declared_optimum")
        reference = scenario.declared_optimum.point
    else:
        reference = oracle_point

    trace = run_ring(config, reference)
    if args.output:
        write_trace_csv(trace, args.output)

    try:
        point, time, spread = consensus_estimate(trace, scenario.consensus_window)
    except ValueError:
        point = None
    converged = point is not None and spread < config.tol_consensus
    if point is not None:
        report.add_solution(
            "consensus",
            problem,
            point,
            time,
            spread_m=spread,
            converged=converged,
            distance_to_oracle_m=point.distance_to(oracle_point),
            time_minus_oracle_s=time - oracle_time,
            final_error_m=trace.records[-1].error_to_reference,
        )
    else:
        report.warnings.append("no Bregman reset happened within the interaction budget")
    report.flags.update(
        interactions=len(trace),
        mode=config.mode.value,
        periods=list(config.periods),
        reset=config.reset.value,
        paper_literal_reset=config.reset is ResetMode.PAPER_LITERAL,
        paper_case_split=config.paper_case_split,
        reference=args.reference,
        trace=args.output or "",
    )
    return report, EXIT_OK if converged else EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cone-rendezvous",
        description="Minimum-time rendezvous by alternating cone projections.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--json", dest="json_out", help="also write the run report as JSON to this path")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oracle", help="brute-force grid search for the optimum")
    p.add_argument("scenario")
    p.add_argument("--tol", type=float, default=None, help="oracle tolerance in meters")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("solve", help="centralized Bregman-over-Dykstra solver")
    p.add_argument("scenario")
    p.add_argument("--dykstra-cycles", type=int, default=100)
    p.add_argument("--max-steps", type=int, default=200)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--paper-case-split", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="run the distributed ring protocol")
    p.add_argument("scenario")
    p.add_argument("-o", "--output", help="trace CSV path")
    p.add_argument("--reference", choices=["oracle", "declared"], default="oracle")
    p.add_argument("--reset", choices=[m.value for m in ResetMode], default=None)
    p.add_argument("--paper-literal-reset", action="store_true")
    p.add_argument("--paper-case-split", action="store_true")
    p.add_argument("--max-interactions", type=int, default=None)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        report, code = args.func(args)
    except InvalidProblemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(report.render())
    if args.json_out:
        with open(args.json_out, "w") as handle:
            json.dump(report.to_dict(), handle, indent=2, sort_keys=False)
            handle.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
