"""Net present value of a production forecast."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import NegativeRate


@dataclass(frozen=True)
class EconomicParams:
    """Prices in USD per m3; ``discount_rate`` is annual and fractional, ``tau_days`` normalizes time."""

    oil_revenue: float = 500.0
    gas_revenue: float = 0.5
    water_production_cost: float = 80.0
    water_injection_cost: float = 0.0
    discount_rate: float = 0.0
    tau_days: float = 365.0

    def __post_init__(self):
        prices = (self.oil_revenue, self.gas_revenue, self.water_production_cost, self.water_injection_cost)
        if min(prices) < 0:
            raise ValueError("prices and costs must be non-negative")
        if self.discount_rate < 0 or self.tau_days <= 0:
            raise ValueError("discount rate must be >= 0 and tau must be positive")

    def scaled(self, alpha: float) -> "EconomicParams":
        return EconomicParams(alpha * self.oil_revenue, alpha * self.gas_revenue,
                              alpha * self.water_production_cost, alpha * self.water_injection_cost,
                              self.discount_rate, self.tau_days)

    @classmethod
    def from_dict(cls, d: dict) -> "EconomicParams":
        return cls(
            oil_revenue=float(d.get("oil_revenue_usd_m3", 500.0)),
            gas_revenue=float(d.get("gas_revenue_usd_m3", 0.0)),
            water_production_cost=float(d.get("water_production_cost_usd_m3", 0.0)),
            water_injection_cost=float(d.get("water_injection_cost_usd_m3", 0.0)),
            discount_rate=float(d.get("discount_rate", 0.0)),
            tau_days=float(d.get("tau_days", 365.0)),
        )


@dataclass
class ProductionSeries:
    """Per-well, per-report-step rates in m3/day.

    Rate arrays have shape ``(n_wells, n_steps)``; ``t`` holds the step end
    times in days. Gas rates are carried for completeness.
    """

    t: np.ndarray
    q_op: np.ndarray
    q_wp: np.ndarray
    q_wi: np.ndarray
    q_gp: Optional[np.ndarray] = None
    well_names: Optional[list] = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float).ravel()
        q = np.asarray(self.q_op, dtype=float)
        shape = q.reshape(-1, self.t.size).shape if self.t.size else (q.shape[0] if q.ndim == 2 else 0, 0)
        self.q_op = np.asarray(self.q_op, dtype=float).reshape(shape)
        self.q_wp = np.asarray(self.q_wp, dtype=float).reshape(shape)
        self.q_wi = np.asarray(self.q_wi, dtype=float).reshape(shape)
        self.q_gp = np.zeros(shape) if self.q_gp is None else np.asarray(self.q_gp, dtype=float).reshape(shape)
        if self.t.size and np.any(np.diff(np.concatenate([[0.0], self.t])) <= 0):
            raise ValueError("report times must be strictly increasing and positive")

    @property
    def dt(self) -> np.ndarray:
        return np.diff(np.concatenate([[0.0], self.t]))

    def cumulative(self, rates: np.ndarray) -> np.ndarray:
        """Cumulative volume per well (m3) for one of the rate arrays."""
        return rates @ self.dt


def npv(series: ProductionSeries, econ: EconomicParams) -> float:
    """Discounted revenue minus water handling over all report steps.

    Each step contributes ``dt_k / (1 + b)^(t_k / tau)`` times the field cash
    rate; injection cost is summed over injectors (rows with ``q_wi``).
    """
    if series.t.size == 0:
        return 0.0
    for name in ("q_gp", "q_op", "q_wp", "q_wi"):
        if np.any(getattr(series, name) < 0):
            raise NegativeRate(f"{name} contains negative rates")
    cash_rate = (econ.gas_revenue * series.q_gp.sum(axis=0)
                 + econ.oil_revenue * series.q_op.sum(axis=0)
                 - econ.water_production_cost * series.q_wp.sum(axis=0)
                 - econ.water_injection_cost * series.q_wi.sum(axis=0))
    discount = (1.0 + econ.discount_rate) ** (series.t / econ.tau_days)
    return float(np.sum(series.dt / discount * cash_rate))
