"""Deterministic simulation of the distributed rendezvous protocol.

``N`` agents sit on a directed ring, agent ``i`` hearing only from ``i - 1``
and agent 1 from agent ``N``.  Each activation an agent takes the incoming
estimate, applies one Dykstra step on its own reachability cone and passes
the result on.  Every ``bregman_period`` of its own activations an agent
zeroes its increment; the plane projection that turns the Dykstra passes
into a Bregman alternation is governed by :class:`ResetMode`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Sequence

from .geometry import (
    ZERO,
    PlanePoint,
    ReachabilityCone,
    SpaceTimePoint,
    project_cone,
    project_cone_paper,
    project_plane,
)
from .rendezvous import InvalidProblemError, RendezvousProblem, Vehicle

__all__ = [
    "ResetMode",
    "SyncMode",
    "AgentState",
    "RingMessage",
    "ScenarioConfig",
    "TraceRecord",
    "Trace",
    "agent_step",
    "run_ring",
    "consensus_estimate",
    "error_series",
    "replay_record",
]

CONE_PROJECTION = "cone_projection"
BREGMAN_RESET = "bregman_reset"


class ResetMode(str, Enum):
    """Where the zero-time-plane projection happens.

    ``LEADER``: agent 1, at the start of each new period on its own clock,
    projects the estimate it receives onto the plane; every agent zeroes
    its own increment at the end of each of its periods.  With equal
    periods this replays centralized Bregman-over-Dykstra exactly.

    ``EVERY_AGENT``: each agent, at the end of each of its periods, zeroes
    its increment and projects its own output onto the plane.

    ``PAPER_LITERAL``: as ``EVERY_AGENT`` but agents other than 1 also
    send the origin on reset, discarding x and y.
    """

    LEADER = "leader"
    EVERY_AGENT = "every_agent"
    PAPER_LITERAL = "paper_literal"


class SyncMode(str, Enum):
    SYNCHRONOUS = "synchronous"
    ASYNCHRONOUS = "asynchronous"


ConeProjection = Callable[[ReachabilityCone, SpaceTimePoint], SpaceTimePoint]


@dataclass(frozen=True)
class AgentState:
    vehicle: Vehicle
    bregman_period: int
    increment: SpaceTimePoint = ZERO
    activation_count: int = 0
    last_sent: SpaceTimePoint | None = None

    def __post_init__(self) -> None:
        if self.bregman_period < 1:
            raise InvalidProblemError(
                f"bregman_period must be >= 1, got {self.bregman_period}",
                f"periods[{self.vehicle.id}]",
            )
        if self.last_sent is None:
            object.__setattr__(self, "last_sent", self.vehicle.position.lift(0.0))

    @property
    def is_leader(self) -> bool:
        return self.vehicle.id == 1


@dataclass(frozen=True)
class RingMessage:
    estimate: SpaceTimePoint
    hop_index: int


@dataclass(frozen=True)
class ScenarioConfig:
    problem: RendezvousProblem
    periods: tuple[int, ...]
    max_interactions: int
    mode: SyncMode = SyncMode.SYNCHRONOUS
    tol_consensus: float = 0.5
    reset: ResetMode = ResetMode.LEADER
    paper_case_split: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "periods", tuple(self.periods))
        object.__setattr__(self, "mode", SyncMode(self.mode))
        object.__setattr__(self, "reset", ResetMode(self.reset))
        n = self.problem.n
        if len(self.periods) != n:
            raise InvalidProblemError(
                f"expected {n} periods (one per vehicle), got {len(self.periods)}", "periods"
            )
        for i, period in enumerate(self.periods, start=1):
            if not isinstance(period, int) or isinstance(period, bool) or period < 1:
                raise InvalidProblemError(f"must be an integer >= 1, got {period!r}", f"periods[{i}]")
        if self.mode is SyncMode.SYNCHRONOUS and len(set(self.periods)) != 1:
            raise InvalidProblemError(
                f"synchronous mode needs equal periods, got {list(self.periods)}", "periods"
            )
        if not isinstance(self.max_interactions, int) or self.max_interactions < 1:
            raise InvalidProblemError(
                f"must be a positive integer, got {self.max_interactions!r}", "max_interactions"
            )
        if not (math.isfinite(self.tol_consensus) and self.tol_consensus > 0):
            raise InvalidProblemError(
                f"must be positive, got {self.tol_consensus!r}", "tol_consensus"
            )

    def cone_projection(self) -> ConeProjection:
        return project_cone_paper if self.paper_case_split else project_cone


@dataclass(frozen=True)
class TraceRecord:
    interaction: int
    agent_id: int
    incoming: SpaceTimePoint
    sent: SpaceTimePoint
    increment: SpaceTimePoint
    error_to_reference: float
    event: str
    # set on bregman_reset records only
    plane_point: PlanePoint | None = None
    pre_reset_time: float | None = None


@dataclass
class Trace:
    config: ScenarioConfig
    reference: PlanePoint
    records: list[TraceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def resets(self) -> list[TraceRecord]:
        return [r for r in self.records if r.event == BREGMAN_RESET]


def _plane_projection_due(state: AgentState, count: int, reset: ResetMode) -> bool:
    if reset is ResetMode.LEADER:
        return state.is_leader and count > 1 and (count - 1) % state.bregman_period == 0
    return count % state.bregman_period == 0


def agent_step(
    state: AgentState,
    incoming: SpaceTimePoint,
    reset: ResetMode = ResetMode.LEADER,
    cone_projection: ConeProjection = project_cone,
) -> tuple[AgentState, SpaceTimePoint]:
    """One activation: a Dykstra step on the agent's own cone.

    Uses nothing but ``state`` and ``incoming``.  Returns the new state and
    the estimate to send to the next agent.
    """
    reset = ResetMode(reset)
    count = state.activation_count + 1
    cone = state.vehicle.cone
    period_end = count % state.bregman_period == 0

    if reset is ResetMode.LEADER and _plane_projection_due(state, count, reset):
        incoming = project_plane(incoming)

    shifted = incoming - state.increment
    out = cone_projection(cone, shifted)
    increment = out - shifted

    if period_end:
        increment = ZERO
        if reset is ResetMode.EVERY_AGENT:
            out = project_plane(out)
        elif reset is ResetMode.PAPER_LITERAL:
            out = project_plane(out) if state.is_leader else ZERO

    new_state = replace(state, increment=increment, activation_count=count, last_sent=out)
    return new_state, out


def _initial_agents(config: ScenarioConfig) -> list[AgentState]:
    return [AgentState(v, p) for v, p in zip(config.problem.vehicles, config.periods)]


def run_ring(config: ScenarioConfig, reference: PlanePoint) -> Trace:
    """Activate agents 1, 2, ..., N, 1, ... for ``config.max_interactions`` hops.

    Every agent starts from its own position at t=0; agent 1 speaks first,
    answering agent N's initial guess.  One trace record per activation.
    """
    agents = _initial_agents(config)
    n = len(agents)
    project = config.cone_projection()
    trace = Trace(config, reference)
    message = RingMessage(agents[-1].last_sent, 0)

    for hop, i in zip(range(1, config.max_interactions + 1), itertools.cycle(range(n))):
        state = agents[i]
        count = state.activation_count + 1
        is_reset = _plane_projection_due(state, count, config.reset)
        new_state, out = agent_step(state, message.estimate, config.reset, project)
        agents[i] = new_state

        plane_point = pre_reset_time = None
        if is_reset:
            if config.reset is ResetMode.LEADER:
                plane_point, pre_reset_time = message.estimate.planar, message.estimate.t
            else:
                # recompute the cone output before it was flattened
                shifted = message.estimate - state.increment
                before = project(state.vehicle.cone, shifted)
                plane_point, pre_reset_time = before.planar, before.t

        trace.records.append(
            TraceRecord(
                interaction=hop,
                agent_id=state.vehicle.id,
                incoming=message.estimate,
                sent=out,
                increment=new_state.increment,
                error_to_reference=math.hypot(out.x - reference.x, out.y - reference.y),
                event=BREGMAN_RESET if is_reset else CONE_PROJECTION,
                plane_point=plane_point,
                pre_reset_time=pre_reset_time,
            )
        )
        message = RingMessage(out, hop)
    return trace


def consensus_estimate(trace: Trace | Sequence[TraceRecord], window: int = 5) -> tuple[PlanePoint, float, float]:
    """Agreed rendezvous point, time and spread from the last resets.

    Averages the plane points of the last ``window`` Bregman resets; the time
    is the mean height of the estimates that were flattened at those resets.
    Spread is the largest pairwise distance among the plane points.
    """
    records = trace.records if isinstance(trace, Trace) else list(trace)
    if not records:
        raise ValueError("empty trace")
    if window < 1:
        raise ValueError("window must be >= 1")
    resets = [r for r in records if r.event == BREGMAN_RESET][-window:]
    if not resets:
        raise ValueError("trace holds no bregman_reset records yet")
    xs = [r.plane_point.x for r in resets]
    ys = [r.plane_point.y for r in resets]
    point = PlanePoint(math.fsum(xs) / len(xs), math.fsum(ys) / len(ys))
    time = math.fsum(r.pre_reset_time for r in resets) / len(resets)
    spread = max(
        (a.plane_point.distance_to(b.plane_point) for a, b in itertools.combinations(resets, 2)),
        default=0.0,
    )
    return point, time, spread


def error_series(trace: Trace | Sequence[TraceRecord], reference: PlanePoint) -> list[tuple[int, float]]:
    """Planar distance from each sent estimate to ``reference``."""
    records = trace.records if isinstance(trace, Trace) else trace
    return [(r.interaction, math.hypot(r.sent.x - reference.x, r.sent.y - reference.y)) for r in records]


def replay_record(trace: Trace, index: int) -> tuple[AgentState, SpaceTimePoint]:
    """Recompute record ``index`` from the agent's own history and its input.

    The agent's state is rebuilt from its previous record alone, then
    :func:`agent_step` is rerun on the logged incoming estimate.
    """
    record = trace.records[index]
    config = trace.config
    agent_index = record.agent_id - 1
    vehicle = config.problem.vehicles[agent_index]
    own = [r for r in trace.records[:index] if r.agent_id == record.agent_id]
    state = AgentState(
        vehicle,
        config.periods[agent_index],
        increment=own[-1].increment if own else ZERO,
        activation_count=len(own),
        last_sent=own[-1].sent if own else None,
    )
    return agent_step(state, record.incoming, config.reset, config.cone_projection())
