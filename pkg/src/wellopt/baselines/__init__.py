"""Baseline optimizers: pattern search, particle swarm and CMA-ES."""
from .cmaes import CmaesConfig, run_cmaes
from .gps import GpsConfig, poll_directions, run_gps
from .pso import PsoConfig, run_pso

__all__ = ["CmaesConfig", "run_cmaes", "GpsConfig", "poll_directions", "run_gps", "PsoConfig", "run_pso"]
