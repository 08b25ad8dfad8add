"""Reservoir grid, rock and fluid description, plus synthetic permeability fields."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

# q [m3/day] = DARCY * k [mD] * area [m2] / (mu [mPa s] * length [m]) * dp [bar]
DARCY = 9.869233e-16 * 1e5 * 86400.0 / 1e-3


@dataclass(eq=False)
class ReservoirModel:
    """Cartesian grid model. Arrays are indexed ``[k, j, i]`` (layer, y, x)."""

    nx: int
    ny: int
    dx: float
    dy: float
    dz: float
    perm: np.ndarray
    porosity: np.ndarray
    nz: int = 1
    ntg: float = 1.0
    initial_oil_saturation: float = 0.8
    initial_pressure: float = 200.0
    mu_o: float = 1.0
    mu_w: float = 1.0
    n_o: float = 2.0
    n_w: float = 2.0
    swc: float = 0.2
    sor: float = 0.2
    krw_end: float = 1.0
    kro_end: float = 1.0
    horizon_days: float = 720.0
    report_steps: int = 24
    well_radius: float = 0.1
    name: str = "model"

    def __post_init__(self):
        shape = (self.nz, self.ny, self.nx)
        self.perm = np.broadcast_to(np.asarray(self.perm, dtype=float), shape).copy()
        self.porosity = np.broadcast_to(np.asarray(self.porosity, dtype=float), shape).copy()
        if np.any(self.perm <= 0):
            raise ValueError("permeability must be positive")
        if np.any(self.porosity <= 0) or np.any(self.porosity >= 1):
            raise ValueError("porosity must lie in (0, 1)")
        if not 0 <= self.initial_oil_saturation <= 1:
            raise ValueError("initial oil saturation must lie in [0, 1]")
        if self.swc + self.sor >= 1:
            raise ValueError("swc + sor must be below 1")
        if self.report_steps < 1 or self.horizon_days <= 0:
            raise ValueError("need at least one report step over a positive horizon")

    @property
    def shape(self):
        return (self.nz, self.ny, self.nx)

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny * self.nz

    def cell_index(self, i, j, k=0) -> int:
        """Flat index of 0-based cell (i, j, k)."""
        return (k * self.ny + j) * self.nx + i

    def contains(self, i, j, k=0) -> bool:
        return 0 <= i < self.nx and 0 <= j < self.ny and 0 <= k < self.nz

    @cached_property
    def pore_volume(self) -> np.ndarray:
        return (self.porosity * self.dx * self.dy * self.dz * self.ntg).ravel()

    @property
    def total_pore_volume(self) -> float:
        return float(self.pore_volume.sum())

    @property
    def initial_water_saturation(self) -> float:
        return 1.0 - self.initial_oil_saturation

    @cached_property
    def connections(self):
        """Neighbour pairs ``(a, b)`` and geometric transmissibilities (mobility excluded)."""
        k = self.perm
        idx = np.arange(self.n_cells).reshape(self.shape)
        a_list, b_list, t_list = [], [], []
        h = self.dz * self.ntg
        specs = (
            (2, self.dx, self.dy * h),   # x faces
            (1, self.dy, self.dx * h),   # y faces
            (0, self.dz, self.dx * self.dy),
        )
        for axis, length, area in specs:
            if self.shape[axis] < 2:
                continue
            lo = [slice(None)] * 3
            hi = [slice(None)] * 3
            lo[axis] = slice(0, -1)
            hi[axis] = slice(1, None)
            ka, kb = k[tuple(lo)], k[tuple(hi)]
            harmonic = 2.0 * ka * kb / (ka + kb)
            a_list.append(idx[tuple(lo)].ravel())
            b_list.append(idx[tuple(hi)].ravel())
            t_list.append((DARCY * harmonic * area / length).ravel())
        if not a_list:
            return np.zeros(0, np.intp), np.zeros(0, np.intp), np.zeros(0)
        return np.concatenate(a_list), np.concatenate(b_list), np.concatenate(t_list)

    def well_index(self, i, j, k=0) -> float:
        """Peaceman well index (mobility excluded) of a vertical perforation in cell (i, j, k)."""
        r_o = 0.14 * np.hypot(self.dx, self.dy)
        kh = self.perm[k, j, i] * self.dz * self.ntg
        return 2.0 * np.pi * DARCY * kh / np.log(r_o / self.well_radius)

    def relperm(self, sw):
        """Corey water and oil relative permeabilities."""
        se = np.clip((np.asarray(sw, dtype=float) - self.swc) / (1.0 - self.swc - self.sor), 0.0, 1.0)
        return self.krw_end * se ** self.n_w, self.kro_end * (1.0 - se) ** self.n_o

    def mobilities(self, sw):
        krw, kro = self.relperm(sw)
        return krw / self.mu_w, kro / self.mu_o

    def fractional_flow(self, sw):
        lw, lo = self.mobilities(sw)
        return lw / (lw + lo)

    @cached_property
    def max_dfdsw(self) -> float:
        s = np.linspace(self.swc, 1.0 - self.sor, 4001)
        f = self.fractional_flow(s)
        return float(np.max(np.abs(np.diff(f) / np.diff(s)))) * 1.05

    def to_dict(self) -> dict:
        def arr(a):
            flat = np.asarray(a).ravel()
            return float(flat[0]) if np.all(flat == flat[0]) else flat.tolist()
        return {
            "name": self.name, "nx": self.nx, "ny": self.ny, "nz": self.nz,
            "dx_m": self.dx, "dy_m": self.dy, "dz_m": self.dz,
            "perm_md": arr(self.perm), "porosity": arr(self.porosity), "ntg": self.ntg,
            "initial_oil_saturation": self.initial_oil_saturation,
            "initial_pressure_bar": self.initial_pressure,
            "visc_o_mpas": self.mu_o, "visc_w_mpas": self.mu_w,
            "corey_n_o": self.n_o, "corey_n_w": self.n_w, "swc": self.swc, "sor": self.sor,
            "krw_end": self.krw_end, "kro_end": self.kro_end,
            "horizon_days": self.horizon_days, "report_steps": self.report_steps,
            "well_radius_m": self.well_radius,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReservoirModel":
        nx, ny, nz = int(d["nx"]), int(d["ny"]), int(d.get("nz", 1))
        perm = d["perm_md"]
        if isinstance(perm, dict):
            perm = permeability_field(perm, nx, ny, nz)
        else:
            perm = np.asarray(perm, dtype=float).reshape(-1)
            perm = perm[0] if perm.size == 1 else perm.reshape(nz, ny, nx)
        poro = np.asarray(d.get("porosity", 0.2), dtype=float).reshape(-1)
        poro = poro[0] if poro.size == 1 else poro.reshape(nz, ny, nx)
        return cls(
            nx=nx, ny=ny, nz=nz, dx=float(d["dx_m"]), dy=float(d["dy_m"]), dz=float(d["dz_m"]),
            perm=perm, porosity=poro, ntg=float(d.get("ntg", 1.0)),
            initial_oil_saturation=float(d.get("initial_oil_saturation", 0.8)),
            initial_pressure=float(d.get("initial_pressure_bar", 200.0)),
            mu_o=float(d.get("visc_o_mpas", 1.0)), mu_w=float(d.get("visc_w_mpas", 1.0)),
            n_o=float(d.get("corey_n_o", 2.0)), n_w=float(d.get("corey_n_w", 2.0)),
            swc=float(d.get("swc", 0.2)), sor=float(d.get("sor", 0.2)),
            krw_end=float(d.get("krw_end", 1.0)), kro_end=float(d.get("kro_end", 1.0)),
            horizon_days=float(d.get("horizon_days", 720.0)), report_steps=int(d.get("report_steps", 24)),
            well_radius=float(d.get("well_radius_m", 0.1)), name=str(d.get("name", "model")),
        )


def quadrant_permeability(nx, ny, high=1000.0, low=100.0, nz=1):
    """Two high and two low permeability quadrants on the diagonals."""
    j, i = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    left = i < nx / 2.0
    top = j < ny / 2.0
    field2d = np.where(left == top, high, low)
    return np.broadcast_to(field2d, (nz, ny, nx)).copy()


def channelized_permeability(nx, ny, nz=1, seed=0, high=1000.0, low=20.0,
                             correlation=(1.5, 6.0), fraction=0.35):
    """Seeded binary channel field: smoothed anisotropic noise thresholded at a sand fraction."""
    from scipy.ndimage import gaussian_filter

    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((nz, ny, nx))
    smooth = gaussian_filter(noise, sigma=(0.0, correlation[0], correlation[1]), mode="wrap")
    cut = np.quantile(smooth, 1.0 - fraction)
    return np.where(smooth >= cut, high, low)


def permeability_field(spec: dict, nx, ny, nz=1):
    kind = spec.get("type")
    if kind == "quadrants":
        return quadrant_permeability(nx, ny, spec.get("high_md", 1000.0), spec.get("low_md", 100.0), nz)
    if kind == "channelized":
        return channelized_permeability(nx, ny, nz, seed=int(spec.get("seed", 0)),
                                        high=spec.get("high_md", 1000.0), low=spec.get("low_md", 20.0),
                                        fraction=spec.get("sand_fraction", 0.35))
    if kind == "uniform":
        return np.full((nz, ny, nx), float(spec["value_md"]))
    raise ValueError(f"unknown permeability field type {kind!r}")
