"""Well parameterizations, control schedules and perforation geometry."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..core import round_half_away
from ..errors import EmptyPerforation

PRODUCER = "producer"
INJECTOR = "injector"


@dataclass
class ControlSchedule:
    """Piecewise-constant control over equal periods of the horizon.

    ``mode`` is ``"rate"`` (liquid rate for producers, water rate for
    injectors, m3/day) or ``"bhp"`` (bar). ``period_ends`` defaults to an even
    split of the simulated horizon.
    """

    mode: str
    values: np.ndarray
    lower: float = 0.0
    upper: float = math.inf
    period_ends: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.mode not in ("rate", "bhp"):
            raise ValueError(f"control mode must be 'rate' or 'bhp', got {self.mode!r}")
        self.values = np.atleast_1d(np.asarray(self.values, dtype=float)).copy()
        if self.values.size < 1:
            raise ValueError("a control schedule needs at least one period")
        if self.period_ends is not None:
            self.period_ends = np.asarray(self.period_ends, dtype=float).ravel()
            if self.period_ends.size != self.values.size:
                raise ValueError("period_ends must match the number of control values")

    @property
    def n_periods(self) -> int:
        return self.values.size

    def ends(self, horizon: float) -> np.ndarray:
        if self.period_ends is not None:
            return self.period_ends
        return horizon * np.arange(1, self.n_periods + 1) / self.n_periods

    def value_at(self, t: float, horizon: float) -> float:
        """Control in force at time ``t`` (periods are closed on the right)."""
        ends = self.ends(horizon)
        k = int(np.searchsorted(ends, t - 1e-9 * horizon, side="left"))
        return float(self.values[min(k, self.n_periods - 1)])

    def with_values(self, values) -> "ControlSchedule":
        return replace(self, values=np.asarray(values, dtype=float).copy())


@dataclass
class WellSegment:
    """Straight trajectory from heel to toe, coordinates in metres (z positive downward)."""

    heel: np.ndarray
    toe: np.ndarray

    @property
    def squared_length(self) -> float:
        d = np.asarray(self.toe, float) - np.asarray(self.heel, float)
        return float(d @ d)

    def length_ok(self, a: float, b: float) -> bool:
        return a <= self.squared_length <= b


@dataclass
class VerticalWell:
    name: str
    role: str
    x: float
    y: float
    control: ControlSchedule
    fixed_placement: bool = False
    fixed_control: bool = False

    n_placement = 2

    def placement_vector(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def with_placement(self, v) -> "VerticalWell":
        return replace(self, x=float(v[0]), y=float(v[1]))

    def placement_bounds(self, model):
        return np.array([1.0, 1.0]), np.array([float(model.nx), float(model.ny)])

    def placement_integer_mask(self):
        return np.array([True, True])

    def cells(self, model):
        i = int(round_half_away(self.x)) - 1
        j = int(round_half_away(self.y)) - 1
        if not (0 <= i < model.nx and 0 <= j < model.ny):
            raise EmptyPerforation(f"well {self.name} at ({self.x}, {self.y}) lies outside the grid")
        return [(i, j, k) for k in range(model.nz)]


@dataclass
class AngledWell:
    """Deviated well given by heel cell (x, y, z), length, azimuth and inclination.

    ``azimuth`` is measured in the x-y plane from +x; ``inclination`` is the
    angle with the horizontal plane (pi/2 is vertical).
    """

    name: str
    role: str
    x: float
    y: float
    z: float
    length: float
    azimuth: float
    inclination: float
    control: ControlSchedule
    length_bounds: tuple = (50.0, 300.0)
    fixed_placement: bool = False
    fixed_control: bool = False

    n_placement = 6

    def placement_vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.length, self.azimuth, self.inclination], dtype=float)

    def with_placement(self, v) -> "AngledWell":
        return replace(self, x=float(v[0]), y=float(v[1]), z=float(v[2]), length=float(v[3]),
                       azimuth=float(v[4]), inclination=float(v[5]))

    def placement_bounds(self, model):
        lo = np.array([1.0, 1.0, 1.0, self.length_bounds[0], 0.0, 0.0])
        hi = np.array([float(model.nx), float(model.ny), float(model.nz), self.length_bounds[1],
                       2.0 * math.pi, 0.5 * math.pi])
        return lo, hi

    def placement_integer_mask(self):
        return np.array([True, True, True, False, False, False])

    def segment(self, model) -> WellSegment:
        ix, iy, iz = (int(round_half_away(v)) for v in (self.x, self.y, self.z))
        # heel sits at the plan-view cell centre on the top face of its layer
        heel = np.array([(ix - 0.5) * model.dx, (iy - 0.5) * model.dy, (iz - 1.0) * model.dz])
        direction = np.array([
            math.cos(self.azimuth) * math.cos(self.inclination),
            math.sin(self.azimuth) * math.cos(self.inclination),
            math.sin(self.inclination),
        ])
        direction[np.abs(direction) < 1e-12] = 0.0
        return WellSegment(heel, heel + self.length * direction)

    def cells(self, model):
        return well_to_cells(self, model)


def well_to_cells(well, model):
    """Cells (0-based ``(i, j, k)``) crossed by a well trajectory, in drilling order.

    Traverses the heel-toe segment cell by cell, stepping one axis at a time
    so that consecutive cells share a face. Cells entered only at the toe
    (zero-length intersection) are excluded; the path is truncated where it
    leaves the grid.
    """
    if isinstance(well, VerticalWell):
        return well.cells(model)
    seg = well.segment(model)
    p0 = np.asarray(seg.heel, float)
    delta = np.asarray(seg.toe, float) - p0
    size = np.array([model.dx, model.dy, model.dz])
    dims = (model.nx, model.ny, model.nz)
    idx = np.floor(p0 / size).astype(int)
    step = np.zeros(3, dtype=int)
    t_max = np.full(3, math.inf)
    t_delta = np.full(3, math.inf)
    for a in range(3):
        if delta[a] > 0:
            step[a] = 1
            t_max[a] = ((idx[a] + 1) * size[a] - p0[a]) / delta[a]
            t_delta[a] = size[a] / delta[a]
        elif delta[a] < 0:
            step[a] = -1
            t_max[a] = (idx[a] * size[a] - p0[a]) / delta[a]
            t_delta[a] = -size[a] / delta[a]
    cells = []
    eps = 1e-12
    while True:
        if not all(0 <= idx[a] < dims[a] for a in range(3)):
            break
        cells.append((int(idx[0]), int(idx[1]), int(idx[2])))
        a = int(np.argmin(t_max))
        if t_max[a] >= 1.0 - eps:
            break
        idx[a] += step[a]
        t_max[a] += t_delta[a]
    if not cells:
        raise EmptyPerforation(f"well {well.name} does not intersect the grid")
    return cells


def well_from_dict(d: dict, horizon: float):
    ctrl = d["control"]
    schedule = ControlSchedule(
        mode=ctrl["mode"], values=ctrl["values"],
        lower=float(ctrl.get("lower", 0.0)), upper=float(ctrl.get("upper", math.inf)),
        period_ends=ctrl.get("period_ends_days"),
    )
    role = d["role"]
    if role not in (PRODUCER, INJECTOR):
        raise ValueError(f"well role must be producer or injector, got {role!r}")
    common = dict(name=d["name"], role=role, control=schedule,
                  fixed_placement=bool(d.get("fixed_placement", False)),
                  fixed_control=bool(d.get("fixed_control", False)))
    if d.get("type", "vertical") == "vertical":
        return VerticalWell(x=float(d["x"]), y=float(d["y"]), **common)
    return AngledWell(x=float(d["x"]), y=float(d["y"]), z=float(d.get("z", 1)),
                      length=float(d["length_m"]), azimuth=float(d.get("azimuth_rad", 0.0)),
                      inclination=float(d.get("inclination_rad", math.pi / 2)),
                      length_bounds=tuple(d.get("length_bounds_m", (50.0, 300.0))), **common)


def well_to_dict(w) -> dict:
    c = w.control
    ctrl = {"mode": c.mode, "values": c.values.tolist(), "lower": c.lower, "upper": c.upper}
    if c.period_ends is not None:
        ctrl["period_ends_days"] = c.period_ends.tolist()
    d = {"name": w.name, "role": w.role, "control": ctrl,
         "fixed_placement": w.fixed_placement, "fixed_control": w.fixed_control}
    if isinstance(w, VerticalWell):
        d.update(type="vertical", x=w.x, y=w.y)
    else:
        d.update(type="angled", x=w.x, y=w.y, z=w.z, length_m=w.length, azimuth_rad=w.azimuth,
                 inclination_rad=w.inclination, length_bounds_m=list(w.length_bounds))
    return d
