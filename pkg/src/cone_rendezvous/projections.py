"""Alternating-projection engines.

Both engines see a convex set only through its metric projection, a plain
callable ``SpaceTimePoint -> SpaceTimePoint``.  :func:`centralized_min_time`
stacks them: Bregman alternation between the zero-time plane and the
intersection of all reachability cones, with the intersection projection
computed by Dykstra's method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .geometry import ZERO, PlanePoint, SpaceTimePoint, project_plane

__all__ = [
    "Projector",
    "DykstraState",
    "AlternationResult",
    "MinTimeResult",
    "HalfSpace",
    "Ball",
    "dykstra_cycle",
    "dykstra_project",
    "bregman_alternate",
    "intersection_projector",
    "centralized_min_time",
]

Projector = Callable[[SpaceTimePoint], SpaceTimePoint]


@dataclass(frozen=True)
class HalfSpace:
    """``{q : <normal, q> >= offset}``."""

    normal: SpaceTimePoint
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.normal.norm() == 0:
            raise ValueError("half-space normal must be nonzero")

    def __call__(self, q: SpaceTimePoint) -> SpaceTimePoint:
        n = self.normal
        gap = n.x * q.x + n.y * q.y + n.t * q.t - self.offset
        if gap >= 0:
            return q
        return q - n * (gap / (n.x * n.x + n.y * n.y + n.t * n.t))


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball in position-time space."""

    center: SpaceTimePoint
    radius: float

    def __post_init__(self) -> None:
        if not self.radius >= 0:
            raise ValueError("radius must be non-negative")

    def __call__(self, q: SpaceTimePoint) -> SpaceTimePoint:
        offset = q - self.center
        r = offset.norm()
        if r <= self.radius:
            return q
        return self.center + offset * (self.radius / r)


@dataclass(frozen=True)
class DykstraState:
    """Current iterate plus one correction increment per set."""

    current: SpaceTimePoint
    increments: tuple[SpaceTimePoint, ...]
    cycle_count: int = 0

    @classmethod
    def start(cls, point: SpaceTimePoint, n_sets: int) -> DykstraState:
        return cls(point, (ZERO,) * n_sets, 0)


@dataclass
class AlternationResult:
    point_a: SpaceTimePoint
    point_b: SpaceTimePoint
    distance: float
    iterations_used: int
    converged: bool
    # (a_n, b_n) for every iteration, filled only when requested
    iterates: list[tuple[SpaceTimePoint, SpaceTimePoint]] = field(default_factory=list)


@dataclass
class MinTimeResult:
    point: PlanePoint
    time: float
    converged: bool
    bregman_steps: int
    alternation: AlternationResult

    def __iter__(self):
        # unpacks as (point, time, converged)
        return iter((self.point, self.time, self.converged))


def dykstra_cycle(state: DykstraState, sets: Sequence[Projector]) -> DykstraState:
    """One full pass of Dykstra's method over ``sets`` in order."""
    if len(state.increments) != len(sets):
        raise ValueError(
            f"state carries {len(state.increments)} increments for {len(sets)} sets"
        )
    x = state.current
    increments = list(state.increments)
    for i, project in enumerate(sets):
        shifted = x - increments[i]
        x = project(shifted)
        increments[i] = x - shifted
    return DykstraState(x, tuple(increments), state.cycle_count + 1)


def dykstra_project(
    sets: Sequence[Projector],
    start: SpaceTimePoint,
    max_cycles: int = 100,
    tol: float = 1e-6,
) -> tuple[SpaceTimePoint, int, bool]:
    """Approximate the projection of ``start`` onto the intersection of ``sets``.

    Stops once a full cycle moves the iterate and every increment by less
    than ``tol``; the iterate alone can sit still for a cycle while the
    increments are still travelling.  A single set is projected once and
    reported converged.  Returns
    ``(point, cycles_used, converged)``.
    """
    if not sets:
        raise ValueError("need at least one set")
    if max_cycles < 1:
        raise ValueError("max_cycles must be >= 1")
    if len(sets) == 1:
        return sets[0](start), 1, True

    state = DykstraState.start(start, len(sets))
    while state.cycle_count < max_cycles:
        previous = state
        state = dykstra_cycle(state, sets)
        moved = max(
            state.current.distance_to(previous.current),
            *(a.distance_to(b) for a, b in zip(state.increments, previous.increments)),
        )
        if moved < tol:
            return state.current, state.cycle_count, True
    return state.current, state.cycle_count, False


def bregman_alternate(
    proj_a: Projector,
    proj_b: Projector,
    start: SpaceTimePoint,
    max_iter: int = 200,
    tol: float = 1e-6,
    record: bool = False,
) -> AlternationResult:
    """Alternate ``a_n = P_A(b_{n-1})``, ``b_n = P_B(a_n)`` from ``a_1 = P_A(start)``.

    For intersecting sets both sequences meet in the intersection; for
    disjoint sets ``|a_n - b_n|`` decreases to the distance between them.
    Stops when ``|a_n - a_{n-1}| < tol``.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    a = proj_a(start)
    b = proj_b(a)
    iterates = [(a, b)] if record else []
    n = 1
    converged = False
    while n < max_iter:
        a_next = proj_a(b)
        b = proj_b(a_next)
        n += 1
        step = a_next.distance_to(a)
        a = a_next
        if record:
            iterates.append((a, b))
        if step < tol:
            converged = True
            break
    return AlternationResult(a, b, a.distance_to(b), n, converged, iterates)


def intersection_projector(
    sets: Sequence[Projector], max_cycles: int = 100, tol: float = 1e-6
) -> Projector:
    """Wrap :func:`dykstra_project` as a projector onto the intersection.

    Each call starts with fresh zero increments.
    """
    sets = tuple(sets)

    def project(q: SpaceTimePoint) -> SpaceTimePoint:
        return dykstra_project(sets, q, max_cycles, tol)[0]

    return project


def centralized_min_time(
    problem,
    dykstra_cycles_per_step: int = 100,
    max_bregman_steps: int = 200,
    tol: float = 1e-6,
    start: SpaceTimePoint | None = None,
    cone_projection: Callable | None = None,
    record: bool = False,
) -> MinTimeResult:
    """Minimum rendezvous time as the plane-to-cone-intersection distance.

    Args:
        problem: a :class:`~cone_rendezvous.rendezvous.RendezvousProblem`.
        dykstra_cycles_per_step: Dykstra budget for each intersection
            projection; more cycles, more accurate limit.
        max_bregman_steps: cap on plane/intersection alternations.
        tol: stopping tolerance for both loops (position-time norm).
        start: initial guess, default the last vehicle's position at t=0.
        cone_projection: ``(cone, q) -> q'``, default the exact projection.
        record: keep every Bregman iterate pair on the result.

    Returns:
        A :class:`MinTimeResult`; unpacks as ``(point, time, converged)``.
    """
    cones = problem.cones()
    if cone_projection is None:
        sets = [cone.project for cone in cones]
    else:
        sets = [(lambda q, c=cone: cone_projection(c, q)) for cone in cones]
    if start is None:
        start = problem.vehicles[-1].position.lift()

    # fixed budget when tol == 0, which replays the ring schedule exactly
    proj_b = intersection_projector(sets, dykstra_cycles_per_step, tol)
    result = bregman_alternate(project_plane, proj_b, start, max_bregman_steps, tol, record)
    time = result.distance
    if not math.isfinite(time):
        raise FloatingPointError("alternation produced a non-finite distance")
    return MinTimeResult(result.point_a.planar, time, result.converged, result.iterations_used, result)
