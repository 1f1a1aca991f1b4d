"""The min-max rendezvous problem and solvers that do not use projections.

``objective(p) = max_i |p - p_i| / v_i`` is the time at which the slowest
vehicle can arrive at ``p``; the rendezvous point minimizes it.
:func:`oracle_solve` is a brute-force grid search kept deliberately
independent of the projection machinery so it can check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import PlanePoint, ReachabilityCone, min_time_to

__all__ = [
    "InvalidProblemError",
    "Vehicle",
    "RendezvousProblem",
    "objective",
    "two_vehicle_optimum",
    "oracle_solve",
    "active_vehicles",
]


class InvalidProblemError(ValueError):
    """A problem or scenario breaks one of the modelling assumptions.

    Assumption 1: distinct start positions and positive speeds.
    Assumption 2: vehicles only know their own state.
    Assumption 3: a single directed ring ordered by vehicle id.
    """

    def __init__(self, message: str, field: str, assumption: int | None = None):
        self.field = field
        self.assumption = assumption
        tag = f" (Assumption {assumption})" if assumption else ""
        super().__init__(f"{field}: {message}{tag}")


@dataclass(frozen=True, slots=True)
class Vehicle:
    id: int
    position: PlanePoint
    speed: float

    def __post_init__(self) -> None:
        if not (isinstance(self.speed, (int, float)) and math.isfinite(self.speed) and self.speed > 0):
            raise InvalidProblemError(
                f"speed must be a positive finite number, got {self.speed!r}",
                f"vehicles[{self.id}].speed",
                assumption=1,
            )

    @property
    def cone(self) -> ReachabilityCone:
        return ReachabilityCone(self.position, float(self.speed))


@dataclass(frozen=True)
class RendezvousProblem:
    vehicles: tuple[Vehicle, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        if len(self.vehicles) < 2:
            raise InvalidProblemError(
                f"need at least 2 vehicles, got {len(self.vehicles)}", "vehicles"
            )
        for expected, vehicle in enumerate(self.vehicles, start=1):
            if vehicle.id != expected:
                raise InvalidProblemError(
                    f"ids must run 1..N in ring order, found {vehicle.id} at position {expected}",
                    f"vehicles[{expected}].id",
                    assumption=3,
                )
        seen: dict[tuple[float, float], int] = {}
        for vehicle in self.vehicles:
            key = (vehicle.position.x, vehicle.position.y)
            if key in seen:
                raise InvalidProblemError(
                    f"vehicles {seen[key]} and {vehicle.id} start at the same position {key}",
                    f"vehicles[{vehicle.id}].position",
                    assumption=1,
                )
            seen[key] = vehicle.id

    @classmethod
    def from_arrays(cls, positions: Sequence[Sequence[float]], speeds: Sequence[float]) -> RendezvousProblem:
        if len(positions) != len(speeds):
            raise ValueError("positions and speeds differ in length")
        return cls(
            tuple(
                Vehicle(i, PlanePoint(float(x), float(y)), float(v))
                for i, ((x, y), v) in enumerate(zip(positions, speeds), start=1)
            )
        )

    @property
    def n(self) -> int:
        return len(self.vehicles)

    def cones(self) -> list[ReachabilityCone]:
        return [v.cone for v in self.vehicles]

    def positions(self) -> np.ndarray:
        return np.array([[v.position.x, v.position.y] for v in self.vehicles])

    def speeds(self) -> np.ndarray:
        return np.array([v.speed for v in self.vehicles], dtype=float)

    def travel_times(self, p: PlanePoint) -> list[float]:
        return [min_time_to(v.cone, p) for v in self.vehicles]


def objective(problem: RendezvousProblem, p: PlanePoint) -> float:
    """Latest arrival time at ``p`` over all vehicles, in seconds."""
    return max(problem.travel_times(p))


def two_vehicle_optimum(v1: Vehicle, v2: Vehicle) -> tuple[PlanePoint, float]:
    """Closed-form rendezvous for two vehicles.

    The meeting point splits the segment between them in the ratio of their
    speeds, so both arrive at ``|p2 - p1| / (v1 + v2)``.
    """
    if v1.position == v2.position:
        raise InvalidProblemError("two vehicles share a start position", "vehicles", assumption=1)
    a, b = v1.speed, v2.speed
    total = a + b
    point = PlanePoint(
        (a * v2.position.x + b * v1.position.x) / total,
        (a * v2.position.y + b * v1.position.y) / total,
    )
    return point, v1.position.distance_to(v2.position) / total


def _zoom_min_y(
    positions: np.ndarray, speeds: np.ndarray, xs: np.ndarray, y_lo: float, y_hi: float, grid: int, cell_tol: float
) -> tuple[np.ndarray, np.ndarray]:
    """For every x in ``xs``, grid-refine ``min_y objective(x, y)``.

    One convex 1-D search per row, all rows advanced together.
    """
    n = len(xs)
    lo = np.full(n, y_lo)
    hi = np.full(n, y_hi)
    frac = np.linspace(0.0, 1.0, grid)
    rows = np.arange(n)
    for _ in range(_MAX_LEVELS):
        ys = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
        worst = np.zeros_like(ys)
        for (px, py), v in zip(positions, speeds):
            np.maximum(worst, np.hypot(xs[:, None] - px, ys - py) / v, out=worst)
        # first minimum per row: ties go to the smaller y
        k = np.argmin(worst, axis=1)
        best_y = ys[rows, k]
        best_f = worst[rows, k]
        cell = (hi - lo) / (grid - 1)
        if np.all(cell < cell_tol):
            return best_y, best_f
        half = (hi - lo) / 8.0
        lo = np.maximum(best_y - half, y_lo)
        hi = np.minimum(best_y + half, y_hi)
    return best_y, best_f


_MAX_LEVELS = 80
_COMPASS = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]


def oracle_solve(
    problem: RendezvousProblem, tol: float = 1e-4, grid: int = 64
) -> tuple[PlanePoint, float]:
    """Brute-force minimizer of :func:`objective`.

    Grid refinement over the vehicles' bounding box (the optimum lies in the
    convex hull of the start positions).  The search is separable: an outer
    grid over x, zooming 4x around the best column, where each column's
    value is ``min_y objective(x, y)`` found by the same zooming grid in y.
    Both 1-D functions are convex, so the minimizer always sits within one
    cell of the grid's best point, and both zooms continue until cells reach
    the float resolution of the box.  A compass-direction polish with steps
    ``tol`` down to ``tol / 100`` finishes.  Ties go to the smaller x, then
    the smaller y.
    """
    if not isinstance(problem, RendezvousProblem):
        raise TypeError("oracle_solve expects a RendezvousProblem")
    if tol <= 0:
        raise ValueError("tol must be positive")
    positions = problem.positions()
    speeds = problem.speeds()
    box_lo = positions.min(axis=0)
    box_hi = positions.max(axis=0)
    scale = max(float(np.max(np.abs(positions))), float(np.max(box_hi - box_lo)), 1.0)
    # point error grows like sqrt(value error) along the valley floor, so
    # both zooms run down to the float resolution of the box
    resolution = scale * 1e-13

    x_lo, x_hi = box_lo[0], box_hi[0]
    for _ in range(_MAX_LEVELS):
        xs = np.linspace(x_lo, x_hi, grid)
        ys, values = _zoom_min_y(positions, speeds, xs, box_lo[1], box_hi[1], grid, resolution)
        i = int(np.argmin(values))
        x, y = float(xs[i]), float(ys[i])
        if (x_hi - x_lo) / (grid - 1) < resolution:
            break
        half = (x_hi - x_lo) / 8.0
        x_lo = max(x - half, box_lo[0])
        x_hi = min(x + half, box_hi[0])

    def f(x: float, y: float) -> float:
        return float(np.max(np.hypot(positions[:, 0] - x, positions[:, 1] - y) / speeds))

    value = f(x, y)
    step = tol
    while step >= tol / 100:
        improved = True
        while improved:
            improved = False
            for dx, dy in _COMPASS:
                scale = step / math.hypot(dx, dy)
                cx, cy = x + dx * scale, y + dy * scale
                cv = f(cx, cy)
                if cv < value:
                    x, y, value = cx, cy, cv
                    improved = True
        step /= 2
    return PlanePoint(x, y), value


def active_vehicles(
    problem: RendezvousProblem, p: PlanePoint, T: float, tol: float = 1e-3
) -> set[int]:
    """Ids of vehicles whose travel time to ``p`` is within ``tol`` of ``T``."""
    return {
        v.id for v, time in zip(problem.vehicles, problem.travel_times(p)) if abs(time - T) <= tol
    }
