"""Acceptance criteria, one test each.

Each test records a ``PASS``/``FAIL`` line (shown in the terminal summary)
before asserting, so a red criterion still reports what it measured.
"""

import csv
import json
import math
import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from cone_rendezvous.cli import main
from cone_rendezvous.geometry import (
    PlanePoint,
    ReachabilityCone,
    SpaceTimePoint,
    contains,
    project_cone,
    project_cone_paper,
    project_plane,
)
from cone_rendezvous.projections import Ball, HalfSpace, bregman_alternate, centralized_min_time, dykstra_project
from cone_rendezvous.rendezvous import RendezvousProblem, objective, oracle_solve, two_vehicle_optimum
from cone_rendezvous.ring_sim import BREGMAN_RESET, ScenarioConfig, consensus_estimate, error_series, run_ring
from cone_rendezvous.scenario import TRACE_HEADER, load_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
SYNC_FILE = SCENARIOS / "five_vehicle.json"
ASYNC_FILE = SCENARIOS / "five_vehicle_async.json"

FIVE = RendezvousProblem.from_arrays(
    [(0, 0), (100, 20), (150, 200), (50, 50), (20, 170)], [5, 7, 10, 6, 4]
)


def _record(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)


@pytest.fixture(scope="module")
def five_oracle():
    return oracle_solve(FIVE)


def _sample_feasible(rng, apex, speed, centre, spread, k):
    """``k`` points of each cone, half near ``centre`` and half anywhere in the box."""
    n = len(apex)
    near = centre[:, None, :2] + rng.normal(size=(n, k // 2, 2)) * spread[:, None, None]
    far = rng.uniform(-500, 500, size=(n, k - k // 2, 2))
    xy = np.concatenate([near, far], axis=1)
    floor = np.hypot(xy[..., 0] - apex[:, None, 0], xy[..., 1] - apex[:, None, 1]) / speed[:, None]
    lift = rng.exponential(spread[:, None] / speed[:, None], size=floor.shape) * (rng.random(floor.shape) < 0.5)
    return np.concatenate([xy, (floor + lift)[..., None]], axis=2)


def test_criterion_1_cone_projection_properties():
    rng = np.random.default_rng(1)
    n, k = 10_000, 1_000
    apex = rng.uniform(-500, 500, (n, 2))
    speed = rng.uniform(0.1, 20, n)
    q = rng.uniform(-500, 500, (n, 3))
    q2 = rng.uniform(-500, 500, (n, 3))

    start = time.perf_counter()
    idem = expand = 0.0
    p = np.empty((n, 3))
    bad_membership = 0
    for i in range(n):
        cone = ReachabilityCone(PlanePoint(*apex[i]), speed[i])
        a, b = SpaceTimePoint(*q[i]), SpaceTimePoint(*q2[i])
        pa, pb = project_cone(cone, a), project_cone(cone, b)
        idem = max(idem, project_cone(cone, pa).distance_to(pa))
        bad_membership += not contains(cone, pa, 1e-9)
        expand = max(expand, pa.distance_to(pb) - a.distance_to(b))
        p[i] = (pa.x, pa.y, pa.t)

    own = np.linalg.norm(q - p, axis=1)
    worst_gap = math.inf
    for lo in range(0, n, 500):
        sl = slice(lo, lo + 500)
        samples = _sample_feasible(rng, apex[sl], speed[sl], p[sl], own[sl] + 1.0, k)
        d = np.linalg.norm(samples - q[sl, None, :], axis=2).min(axis=1)
        worst_gap = min(worst_gap, float(np.min(d - own[sl])))
    elapsed = time.perf_counter() - start

    ok = idem <= 1e-9 and bad_membership == 0 and expand <= 1e-9 and worst_gap >= -1e-9 and elapsed < 10
    _record(
        1,
        ok,
        f"{n} pairs: idempotence {idem:.1e}, {bad_membership} outside cone, "
        f"expansion {expand:.1e}, minimality margin {worst_gap:.2e}, {elapsed:.2f} s",
    )
    assert ok


def test_criterion_2_unit_speed_case_splits_agree():
    rng = np.random.default_rng(2)
    n = 10_000
    apex = rng.uniform(-500, 500, (n, 2))
    q = rng.uniform(-500, 500, (n, 3))
    mismatches = 0
    for i in range(n):
        cone = ReachabilityCone(PlanePoint(*apex[i]), 1.0)
        point = SpaceTimePoint(*q[i])
        mismatches += project_cone(cone, point) != project_cone_paper(cone, point)

    # divergence for v != 1: the alternative apex test is not the polar cone
    fast = ReachabilityCone(PlanePoint(0, 0), 2.0)
    q_fast = SpaceTimePoint(0.5, 0, -0.4)
    fast_good, fast_table = project_cone(fast, q_fast), project_cone_paper(fast, q_fast)
    slow = ReachabilityCone(PlanePoint(0, 0), 0.5)
    q_slow = SpaceTimePoint(1.0, 0, -1.0)
    slow_good, slow_table = project_cone(slow, q_slow), project_cone_paper(slow, q_slow)
    diverges = (
        q_fast.distance_to(fast_good) < q_fast.distance_to(fast_table)
        and not contains(slow, slow_table, 1e-9)
        and slow_good == SpaceTimePoint(0, 0, 0)
    )

    ok = mismatches == 0 and diverges
    _record(
        2,
        ok,
        f"v=1: {mismatches}/{n} mismatches; v=2 table lands {q_fast.distance_to(fast_table):.4f} m away "
        f"vs {q_fast.distance_to(fast_good):.4f}; v=0.5 table output infeasible: {not contains(slow, slow_table, 1e-9)}",
    )
    assert ok


def test_criterion_3_two_vehicle_closed_form():
    rng = np.random.default_rng(3)
    tol = 1e-4
    worst = {"central_m": 0.0, "central_s": 0.0, "ring_m": 0.0, "ring_s": 0.0, "oracle_m": 0.0}
    for _ in range(100):
        while True:
            pos = rng.uniform(-100, 100, (2, 2))
            if np.linalg.norm(pos[0] - pos[1]) > 1.0:
                break
        problem = RendezvousProblem.from_arrays(pos, rng.uniform(1, 10, 2))
        point, t_star = two_vehicle_optimum(*problem.vehicles)

        central = centralized_min_time(problem, dykstra_cycles_per_step=1000, tol=1e-9)
        trace = run_ring(ScenarioConfig(problem, (200, 200), 40_000), point)
        ring_point, ring_time, _ = consensus_estimate(trace)
        oracle_point, _ = oracle_solve(problem, tol)

        worst["central_m"] = max(worst["central_m"], central.point.distance_to(point))
        worst["central_s"] = max(worst["central_s"], abs(central.time - t_star))
        worst["ring_m"] = max(worst["ring_m"], ring_point.distance_to(point))
        worst["ring_s"] = max(worst["ring_s"], abs(ring_time - t_star))
        worst["oracle_m"] = max(worst["oracle_m"], oracle_point.distance_to(point))

    ok = (
        max(worst["central_m"], worst["central_s"], worst["ring_m"], worst["ring_s"]) <= 1e-3
        and worst["oracle_m"] <= 10 * tol
    )
    _record(3, ok, "100 instances, worst " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))
    assert ok


def test_criterion_4_bregman_desk_check():
    left = Ball(SpaceTimePoint(0, 0, 0), 1.0)
    right = Ball(SpaceTimePoint(4, 0, 0), 1.0)
    disjoint = bregman_alternate(left, right, SpaceTimePoint(-3, 2, 1), max_iter=10_000, tol=1e-12)

    cone = ReachabilityCone(PlanePoint(0, 0), 1.0)
    touching = bregman_alternate(project_plane, cone.project, SpaceTimePoint(30, 40, 0), max_iter=10_000, tol=1e-12)

    ok = (
        abs(disjoint.distance - 2.0) <= 1e-6
        and disjoint.iterations_used <= 10_000
        and touching.distance <= 1e-6
        and touching.iterations_used <= 10_000
    )
    _record(
        4,
        ok,
        f"disjoint balls distance {disjoint.distance:.9f} in {disjoint.iterations_used} iterations; "
        f"plane + cone distance {touching.distance:.1e} in {touching.iterations_used} iterations",
    )
    assert ok


def test_criterion_5_dykstra_desk_check():
    orthant = [HalfSpace(SpaceTimePoint(1, 0, 0)), HalfSpace(SpaceTimePoint(0, 1, 0))]
    p_orthant, _, _ = dykstra_project(orthant, SpaceTimePoint(-1, -2, 0), tol=1e-12)
    cones = [ReachabilityCone(PlanePoint(0, 0), 1).project, ReachabilityCone(PlanePoint(10, 0), 1).project]
    p_cones, cycles, _ = dykstra_project(cones, SpaceTimePoint(5, 0, 0), max_cycles=10_000, tol=1e-12)

    err_orthant = p_orthant.distance_to(SpaceTimePoint(0, 0, 0))
    err_cones = p_cones.distance_to(SpaceTimePoint(5, 0, 5))
    ok = err_orthant <= 1e-9 and err_cones <= 1e-5
    _record(5, ok, f"orthant error {err_orthant:.1e}; two cones error {err_cones:.1e} after {cycles} cycles")
    assert ok


def _consensus_ok(trace, oracle_point, oracle_time, window):
    point, t, spread = consensus_estimate(trace, window)
    return point.distance_to(oracle_point) <= 0.5 and abs(t - oracle_time) <= 0.05 and spread < 0.5, point, t


def test_criterion_6_scenario_one_within_2000_interactions(five_oracle, tmp_path, capsys):
    oracle_point, oracle_time = five_oracle
    scenario = load_scenario(SYNC_FILE)
    budget = 2000

    # report side by side: declared values beside the oracle, inconsistency flagged
    report_path = tmp_path / "report.json"
    main(["--json", str(report_path), "simulate", str(SYNC_FILE), "--max-interactions", str(budget)])
    rendered = capsys.readouterr().out
    report = json.loads(report_path.read_text())
    declared_flagged = (
        report["declared"]["point"] == {"x_m": 50.0, "y_m": 66.0}
        and report["declared"]["consistent_with_objective"] is False
        and abs(report["declared"]["objective_at_point_s"] - 27.06) < 0.01
        and "WARNING" in rendered
    )

    trace = run_ring(replace(scenario.config, max_interactions=budget), oracle_point)
    within, point, t = _consensus_ok(trace, oracle_point, oracle_time, scenario.consensus_window)

    # where the criterion is first met, for the record
    long = run_ring(replace(scenario.config, max_interactions=10_000), oracle_point)
    first_met = None
    for index, record in enumerate(long.records):
        if record.event == BREGMAN_RESET:
            if _consensus_ok(long.records[: index + 1], oracle_point, oracle_time, scenario.consensus_window)[0]:
                first_met = record.interaction
                break

    ok = within and declared_flagged
    _record(
        6,
        ok,
        f"after {budget} interactions consensus ({point.x:.3f}, {point.y:.3f}) m / {t:.3f} s is "
        f"{point.distance_to(oracle_point):.3f} m and {abs(t - oracle_time):.3f} s from oracle "
        f"({oracle_point.x:.4f}, {oracle_point.y:.4f}) m / {oracle_time:.4f} s; "
        f"first met at interaction {first_met}; declared optimum flagged: {declared_flagged}",
    )
    assert ok


def test_criterion_7_scenario_two_asynchronous(five_oracle):
    oracle_point, _ = five_oracle
    sync = load_scenario(SYNC_FILE)
    asyn = load_scenario(ASYNC_FILE)
    sync_point, _, _ = consensus_estimate(run_ring(sync.config, oracle_point), sync.consensus_window)
    trace = run_ring(asyn.config, oracle_point)
    async_point, _, spread = consensus_estimate(trace, asyn.consensus_window)
    series = error_series(trace, oracle_point)
    drop = series[0][1] / max(series[-1][1], 1e-300)

    gap = async_point.distance_to(sync_point)
    ok = gap <= 1e-2 and drop >= 100
    _record(
        7,
        ok,
        f"periods {list(asyn.config.periods)}: {gap:.1e} m from the synchronous consensus; "
        f"error {series[0][1]:.2f} m -> {series[-1][1]:.1e} m (x{drop:.1e}); spread {spread:.1e} m",
    )
    assert ok


def test_criterion_8_reset_frequency_trade_off(five_oracle):
    oracle_point, _ = five_oracle
    errors = {}
    for period in (10, 50, 100):
        trace = run_ring(ScenarioConfig(FIVE, (period,) * 5, 10_000), oracle_point)
        point, _, _ = consensus_estimate(trace)
        errors[period] = point.distance_to(oracle_point)
    e = [errors[p] for p in (10, 50, 100)]
    ok = all(later <= earlier + 1e-3 for earlier, later in zip(e, e[1:]))
    _record(8, ok, "final error by reset period " + ", ".join(f"{p}: {v:.2e} m" for p, v in errors.items()))
    assert ok


def test_criterion_9_determinism_and_causality(tmp_path, capsys):
    traces = []
    for scenario_file in (SYNC_FILE, ASYNC_FILE):
        paths = []
        for run in range(2):
            path = tmp_path / f"{scenario_file.stem}_{run}.csv"
            main(["simulate", str(scenario_file), "--max-interactions", "3000", "-o", str(path)])
            paths.append(path)
        traces.append(paths)
    capsys.readouterr()
    identical = all(a.read_bytes() == b.read_bytes() for a, b in traces)

    header_ok = all(next(csv.reader(a.open())) == TRACE_HEADER for a, _ in traces)
    config = load_scenario(SYNC_FILE).config
    trace = run_ring(replace(config, max_interactions=3000), PlanePoint(100 / 9, 850 / 9))
    n = config.problem.n
    linked = all(cur.incoming == prev.sent for prev, cur in zip(trace.records, trace.records[1:]))
    order = all(r.agent_id == (r.interaction - 1) % n + 1 for r in trace.records)

    ok = identical and header_ok and linked and order
    _record(
        9,
        ok,
        f"byte-identical CSVs: {identical}; header ok: {header_ok}; "
        f"incoming == previous sent on all {len(trace) - 1} links: {linked}; ring order: {order}",
    )
    assert ok


def test_feasibility_of_the_agreed_limit(five_oracle):
    trace = run_ring(load_scenario(SYNC_FILE).config, five_oracle[0])
    point, t, _ = consensus_estimate(trace)
    assert abs(objective(FIVE, point) - t) <= 0.05
