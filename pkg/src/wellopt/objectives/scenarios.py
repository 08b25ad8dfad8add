"""Decision-vector layouts, reservoir NPV problems and bundled cases.

A flat decision vector lists wells in declaration order. For each well the
placement parameters (if optimized) come first, then one control value per
period (if optimized).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from ..core import Bounds, Problem
from ..errors import DimensionMismatch
from .economics import EconomicParams, npv
from .reservoir import ReservoirModel
from .simulator import simulate
from .wells import well_from_dict, well_to_dict

PLACEMENT = "placement"
CONTROL = "control"
JOINT = "joint"
SCENARIOS = (PLACEMENT, CONTROL, JOINT)


@dataclass(frozen=True)
class Block:
    well: int
    kind: str
    start: int
    stop: int


@dataclass
class VariableLayout:
    """Mapping between a flat vector and the wells of a scenario."""

    scenario: str
    wells: list
    blocks: list = field(default_factory=list)

    @classmethod
    def build(cls, wells, scenario: str) -> "VariableLayout":
        if scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
        blocks, pos = [], 0
        for w_idx, w in enumerate(wells):
            if scenario in (PLACEMENT, JOINT) and not w.fixed_placement:
                blocks.append(Block(w_idx, PLACEMENT, pos, pos + w.n_placement))
                pos += w.n_placement
            if scenario in (CONTROL, JOINT) and not w.fixed_control:
                n_t = w.control.n_periods
                if not (np.isfinite(w.control.lower) and np.isfinite(w.control.upper)):
                    raise DimensionMismatch(f"well {w.name}: control bounds must be finite to optimize")
                blocks.append(Block(w_idx, CONTROL, pos, pos + n_t))
                pos += n_t
        if pos == 0:
            raise DimensionMismatch(f"scenario {scenario!r} leaves no free variables")
        return cls(scenario, list(wells), blocks)

    @property
    def dimension(self) -> int:
        return self.blocks[-1].stop

    def indices(self, kind: str) -> np.ndarray:
        """Flat indices of all placement (or control) variables."""
        return np.concatenate([np.arange(b.start, b.stop) for b in self.blocks if b.kind == kind]
                              or [np.zeros(0, dtype=int)]).astype(int)

    def bounds(self, model):
        lo = np.empty(self.dimension)
        hi = np.empty(self.dimension)
        for b in self.blocks:
            w = self.wells[b.well]
            if b.kind == PLACEMENT:
                lo[b.start:b.stop], hi[b.start:b.stop] = w.placement_bounds(model)
            else:
                lo[b.start:b.stop], hi[b.start:b.stop] = w.control.lower, w.control.upper
        return lo, hi

    def integer_mask(self) -> np.ndarray:
        mask = np.zeros(self.dimension, dtype=bool)
        for b in self.blocks:
            if b.kind == PLACEMENT:
                mask[b.start:b.stop] = self.wells[b.well].placement_integer_mask()
        return mask

    def pack(self, placements=None, controls=None) -> np.ndarray:
        """Flat vector from per-block placement and control vectors, in block order."""
        placements = list(placements or [])
        controls = list(controls or [])
        want_p = [b for b in self.blocks if b.kind == PLACEMENT]
        want_c = [b for b in self.blocks if b.kind == CONTROL]
        if len(placements) != len(want_p) or len(controls) != len(want_c):
            raise DimensionMismatch(f"expected {len(want_p)} placement and {len(want_c)} control vectors, "
                                    f"got {len(placements)} and {len(controls)}")
        x = np.empty(self.dimension)
        for blocks, vecs in ((want_p, placements), (want_c, controls)):
            for b, vec in zip(blocks, vecs):
                vec = np.asarray(vec, dtype=float).ravel()
                if vec.size != b.stop - b.start:
                    raise DimensionMismatch(f"well {self.wells[b.well].name}: {b.kind} vector has "
                                            f"{vec.size} entries, expected {b.stop - b.start}")
                x[b.start:b.stop] = vec
        return x

    def unpack(self, x):
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.dimension:
            raise DimensionMismatch(f"vector has {x.size} entries, layout needs {self.dimension}")
        placements = [x[b.start:b.stop].copy() for b in self.blocks if b.kind == PLACEMENT]
        controls = [x[b.start:b.stop].copy() for b in self.blocks if b.kind == CONTROL]
        return placements, controls

    def current(self) -> np.ndarray:
        """Vector of the wells' present placements and controls."""
        p = [self.wells[b.well].placement_vector() for b in self.blocks if b.kind == PLACEMENT]
        c = [self.wells[b.well].control.values for b in self.blocks if b.kind == CONTROL]
        return self.pack(p, c)

    def apply(self, x) -> list:
        """Wells with the variables of ``x`` substituted."""
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.dimension:
            raise DimensionMismatch(f"vector has {x.size} entries, layout needs {self.dimension}")
        wells = list(self.wells)
        for b in self.blocks:
            w = wells[b.well]
            if b.kind == PLACEMENT:
                wells[b.well] = w.with_placement(x[b.start:b.stop])
            else:
                wells[b.well] = _with_control(w, x[b.start:b.stop])
        return wells

    def with_wells(self, wells) -> "VariableLayout":
        return VariableLayout(self.scenario, list(wells), list(self.blocks))


def _with_control(w, values):
    return replace(w, control=w.control.with_values(values))


class ReservoirObjective:
    """NPV of a decision vector; picklable so trials can run in worker processes."""

    def __init__(self, model: ReservoirModel, layout: VariableLayout, econ: EconomicParams, backend=None):
        self.model = model
        self.layout = layout
        self.econ = econ
        self.backend = backend

    def wells(self, x):
        return self.layout.apply(x)

    def __call__(self, x) -> float:
        series = simulate(self.model, self.layout.apply(x), backend=self.backend)
        return npv(series, self.econ)


def make_problem(model, wells, econ, scenario: str, budget: int, name=None, backend=None) -> Problem:
    """NPV maximization problem over the free variables of ``scenario``.

    The objective is a :class:`ReservoirObjective`; its ``layout`` packs and
    unpacks vectors. The initial guess is the wells' present configuration.
    """
    layout = VariableLayout.build(wells, scenario)
    lo, hi = layout.bounds(model)
    objective = ReservoirObjective(model, layout, econ, backend)
    x0 = np.clip(layout.current(), lo, hi)
    return Problem(Bounds(lo, hi), objective, budget, sense="maximize",
                   integer_mask=layout.integer_mask(), initial_guess=x0,
                   name=name or f"{model.name}:{scenario}")


@dataclass
class ReservoirCase:
    """Model, wells and economics bundled as one scenario file."""

    name: str
    model: ReservoirModel
    wells: list
    econ: EconomicParams
    description: str = ""

    def problem(self, scenario: str, budget: int, backend=None) -> Problem:
        return make_problem(self.model, self.wells, self.econ, scenario, budget,
                            name=f"{self.name}:{scenario}", backend=backend)

    def to_dict(self) -> dict:
        e = self.econ
        return {
            "name": self.name, "description": self.description, "model": self.model.to_dict(),
            "economics": {
                "oil_revenue_usd_m3": e.oil_revenue, "gas_revenue_usd_m3": e.gas_revenue,
                "water_production_cost_usd_m3": e.water_production_cost,
                "water_injection_cost_usd_m3": e.water_injection_cost,
                "discount_rate": e.discount_rate, "tau_days": e.tau_days,
            },
            "wells": [well_to_dict(w) for w in self.wells],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReservoirCase":
        model = ReservoirModel.from_dict(d["model"])
        wells = [well_from_dict(w, model.horizon_days) for w in d["wells"]]
        return cls(str(d.get("name", model.name)), model, wells,
                   EconomicParams.from_dict(d.get("economics", {})), str(d.get("description", "")))


BUILTIN_PREFIX = "builtin:"


def builtin_cases() -> list:
    folder = resources.files("wellopt") / "data"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load_case(source) -> ReservoirCase:
    """Read a case from a JSON path or a bundled ``builtin:<name>``."""
    source = str(source)
    if source.startswith(BUILTIN_PREFIX):
        name = source[len(BUILTIN_PREFIX):]
        path = resources.files("wellopt") / "data" / f"{name}.json"
        if not path.is_file():
            raise FileNotFoundError(f"no bundled case {name!r}; available: {builtin_cases()}")
        text = path.read_text()
    else:
        text = Path(source).read_text()
    return ReservoirCase.from_dict(json.loads(text))
