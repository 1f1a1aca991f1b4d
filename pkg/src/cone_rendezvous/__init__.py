"""Minimum-time rendezvous for vehicles with different top speeds.

The rendezvous time is the distance between the zero-time plane and the
intersection of the vehicles' position-time reachability cones; it is
found by alternating projections, centrally or around a ring of agents.
"""

from .geometry import (
    PlanePoint,
    ReachabilityCone,
    SpaceTimePoint,
    contains,
    min_time_to,
    project_cone,
    project_cone_paper,
    project_plane,
)
from .projections import (
    AlternationResult,
    DykstraState,
    bregman_alternate,
    centralized_min_time,
    dykstra_cycle,
    dykstra_project,
)
from .rendezvous import (
    InvalidProblemError,
    RendezvousProblem,
    Vehicle,
    active_vehicles,
    objective,
    oracle_solve,
    two_vehicle_optimum,
)
from .ring_sim import (
    AgentState,
    ResetMode,
    ScenarioConfig,
    SyncMode,
    Trace,
    TraceRecord,
    agent_step,
    consensus_estimate,
    error_series,
    run_ring,
)
from .scenario import emit_scenario, load_scenario, parse_scenario, write_trace_csv

__version__ = "0.1.0"
