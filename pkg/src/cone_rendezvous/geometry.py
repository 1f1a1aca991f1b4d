"""Position-time geometry: reachability cones and exact metric projections.

A vehicle starting at ``apex`` with top speed ``v`` can be at planar position
``p`` at any time ``t >= |p - apex| / v``.  That set of (x, y, t) triples is a
second-order cone, and the rendezvous solvers only ever touch it through
:meth:`ReachabilityCone.project`.

Time is measured in seconds and weighted 1:1 against meters in the
position-time norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PlanePoint",
    "SpaceTimePoint",
    "ReachabilityCone",
    "min_time_to",
    "contains",
    "project_cone",
    "project_cone_paper",
    "project_cone_batch",
    "project_plane",
    "ZERO",
]


def _check_finite(*values: float) -> None:
    for value in values:
        if not math.isfinite(value):
            raise ValueError(f"coordinates must be finite, got {values!r}")


@dataclass(frozen=True, slots=True)
class PlanePoint:
    """A position in the x-y plane, in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        _check_finite(self.x, self.y)

    def distance_to(self, other: PlanePoint) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def lift(self, t: float = 0.0) -> SpaceTimePoint:
        return SpaceTimePoint(self.x, self.y, t)


@dataclass(frozen=True, slots=True)
class SpaceTimePoint:
    """A point (x [m], y [m], t [s]) of position-time space.

    Also used for Dykstra increments, which live in the same vector space.
    ``t`` may be negative: intermediate iterates leave the feasible region.
    """

    x: float
    y: float
    t: float

    def __post_init__(self) -> None:
        _check_finite(self.x, self.y, self.t)

    def __add__(self, other: SpaceTimePoint) -> SpaceTimePoint:
        return SpaceTimePoint(self.x + other.x, self.y + other.y, self.t + other.t)

    def __sub__(self, other: SpaceTimePoint) -> SpaceTimePoint:
        return SpaceTimePoint(self.x - other.x, self.y - other.y, self.t - other.t)

    def __mul__(self, k: float) -> SpaceTimePoint:
        return SpaceTimePoint(self.x * k, self.y * k, self.t * k)

    __rmul__ = __mul__

    def norm(self) -> float:
        return math.hypot(self.x, self.y, self.t)

    def distance_to(self, other: SpaceTimePoint) -> float:
        return math.hypot(self.x - other.x, self.y - other.y, self.t - other.t)

    @property
    def planar(self) -> PlanePoint:
        return PlanePoint(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.t])


ZERO = SpaceTimePoint(0.0, 0.0, 0.0)


@dataclass(frozen=True, slots=True)
class ReachabilityCone:
    """Every (position, time) pair a vehicle can reach.

    ``{(p, t) : t >= |p - apex| / speed}`` with the apex at the vehicle's
    initial position and ``speed`` in m/s.
    """

    apex: PlanePoint
    speed: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.speed) and self.speed > 0):
            raise ValueError(f"cone speed must be positive and finite, got {self.speed!r}")

    def project(self, q: SpaceTimePoint) -> SpaceTimePoint:
        return project_cone(self, q)

    def contains(self, q: SpaceTimePoint, tol: float = 0.0) -> bool:
        return contains(self, q, tol)


def min_time_to(cone: ReachabilityCone, p: PlanePoint) -> float:
    """Seconds the cone's vehicle needs to reach ``p`` in a straight line."""
    return math.hypot(p.x - cone.apex.x, p.y - cone.apex.y) / cone.speed


def contains(cone: ReachabilityCone, q: SpaceTimePoint, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return q.t >= min_time_to(cone, q.planar) - tol


def _surface_point(cone: ReachabilityCone, dx: float, dy: float, s: float, t: float) -> SpaceTimePoint:
    v = cone.speed
    scale = (v * v * s + v * t) / ((v * v + 1.0) * s)
    return SpaceTimePoint(
        dx * scale + cone.apex.x,
        dy * scale + cone.apex.y,
        (v * s + t) / (v * v + 1.0),
    )


def project_cone(cone: ReachabilityCone, q: SpaceTimePoint) -> SpaceTimePoint:
    """Euclidean projection of ``q`` onto ``cone``.

    Three regions, checked in this order:

    * inside (``s <= v*t``): ``q`` itself;
    * polar cone (``v*s <= -t``): the apex at time zero;
    * otherwise the nearest point on the generatrix through ``q``'s bearing.

    ``s`` is the planar distance from ``q`` to the apex.  The polar test is
    the one that makes the result the true metric projection for every
    speed; :func:`project_cone_paper` keeps the ``s <= -v*t`` variant.
    """
    v = cone.speed
    dx = q.x - cone.apex.x
    dy = q.y - cone.apex.y
    s = math.hypot(dx, dy)
    if s <= v * q.t:
        return q
    if v * s <= -q.t:
        return SpaceTimePoint(cone.apex.x, cone.apex.y, 0.0)
    return _surface_point(cone, dx, dy, s, q.t)


def project_cone_paper(cone: ReachabilityCone, q: SpaceTimePoint) -> SpaceTimePoint:
    """Cone projection with the original three-way split.

    Surface when ``s > |v*t|``, unchanged when ``s <= v*t``, apex when
    ``s <= -v*t``.  Identical to :func:`project_cone` for ``v == 1``; for
    other speeds a wedge of points with ``t < 0`` lands on the wrong branch.
    """
    v = cone.speed
    dx = q.x - cone.apex.x
    dy = q.y - cone.apex.y
    s = math.hypot(dx, dy)
    if s - abs(v * q.t) > 0:
        return _surface_point(cone, dx, dy, s, q.t)
    if s <= v * q.t:
        return q
    # s <= -v*t is the only case left
    return SpaceTimePoint(cone.apex.x, cone.apex.y, 0.0)


def project_cone_batch(apex: np.ndarray, speed: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Vectorized :func:`project_cone`.

    Args:
        apex: ``(n, 2)`` apex positions.
        speed: ``(n,)`` cone speeds.
        q: ``(n, 3)`` points to project.

    Returns:
        ``(n, 3)`` projections, same branch logic as the scalar routine.
    """
    apex = np.asarray(apex, dtype=float)
    v = np.asarray(speed, dtype=float)
    q = np.asarray(q, dtype=float)
    d = q[:, :2] - apex
    s = np.hypot(d[:, 0], d[:, 1])
    t = q[:, 2]
    inside = s <= v * t
    polar = ~inside & (v * s <= -t)
    surface = ~inside & ~polar

    out = q.copy()
    out[polar, :2] = apex[polar]
    out[polar, 2] = 0.0

    vs, ss, ts = v[surface], s[surface], t[surface]
    scale = (vs * vs * ss + vs * ts) / ((vs * vs + 1.0) * ss)
    out[surface, :2] = d[surface] * scale[:, None] + apex[surface]
    out[surface, 2] = (vs * ss + ts) / (vs * vs + 1.0)
    return out


def project_plane(q: SpaceTimePoint) -> SpaceTimePoint:
    """Projection onto the zero-time plane ``{t = 0}``."""
    return SpaceTimePoint(q.x, q.y, 0.0)
