"""(mu/mu_w, lambda) CMA-ES with rank-one and rank-mu covariance updates."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import Evaluator, RunResult
from ..errors import BudgetExhausted, ConfigInconsistent

MAX_RESAMPLES = 10
EIG_FLOOR = 1e-14
SIGMA_STOP = 1e-12
# generations in a row that only hit cached (rounded) points before stopping
STALL_GENERATIONS = 50


@dataclass(frozen=True)
class CmaesConfig:
    """Strategy parameters; build with :meth:`for_dimension` for the defaults."""

    lam: int
    mu: int
    weights: tuple
    mu_eff: float
    c_c: float
    c_sigma: float
    d_sigma: float
    mu_cov: float
    c_cov: float
    initial_sigma: float = 0.3
    seed: Optional[int] = None

    def __post_init__(self):
        if self.lam < 2 or not 1 <= self.mu <= self.lam or len(self.weights) != self.mu:
            raise ValueError("need lam >= 2, 1 <= mu <= lam and mu weights")
        for name in ("c_c", "c_sigma", "c_cov"):
            if not 0 < getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.d_sigma < 1 or self.mu_cov < 1:
            raise ValueError("need d_sigma >= 1 and mu_cov >= 1")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w <= 0) or abs(w.sum() - 1) > 1e-12:
            raise ConfigInconsistent("weights must be positive and sum to 1")
        if abs(self.mu_eff - 1.0 / np.sum(w ** 2)) > 1e-9 * self.mu_eff:
            raise ConfigInconsistent(f"mu_eff={self.mu_eff} disagrees with the weights "
                                     f"({1.0 / np.sum(w ** 2)})")

    @classmethod
    def for_dimension(cls, n: int, initial_sigma: float = 0.3, seed=None, **overrides) -> "CmaesConfig":
        lam = 4 + int(math.floor(3 * math.log(n)))
        mu = lam // 2
        w = math.log(mu + 1) - np.log(np.arange(1, mu + 1))
        w = w / w.sum()
        mu_eff = float(1.0 / np.sum(w ** 2))
        c_c = 4.0 / (n + 4)
        c_sigma = (mu_eff + 2) / (n + mu_eff + 3)
        d_sigma = 1 + 2 * max(0.0, math.sqrt((mu_eff - 1) / (n + 1)) - 1) + c_sigma
        mu_cov = mu_eff
        c_cov = (1 / mu_cov) * 2 / (n + math.sqrt(2)) ** 2 + (1 - 1 / mu_cov) * min(
            1.0, (2 * mu_eff - 1) / ((n + 2) ** 2 + mu_eff))
        params = dict(lam=lam, mu=mu, weights=tuple(float(t) for t in w), mu_eff=mu_eff, c_c=c_c,
                      c_sigma=c_sigma, d_sigma=d_sigma, mu_cov=mu_cov, c_cov=c_cov,
                      initial_sigma=initial_sigma, seed=seed)
        params.update(overrides)
        return cls(**params)


def run_cmaes(problem, config: CmaesConfig = None, start=None, seed=None) -> RunResult:
    """CMA-ES in coordinates normalised to the unit box.

    Samples outside the bounds are redrawn up to ten times, then clamped.
    An explicitly given ``start`` is evaluated first so a warm start never
    loses the incumbent. The run ends on budget, when the step size
    collapses, or when integer rounding keeps producing known points.
    """
    n = problem.dimension
    if config is None:
        config = CmaesConfig.for_dimension(n)
    seed = config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    ev = Evaluator(problem)
    lo, width = problem.lower, problem.upper - problem.lower
    explicit = start is not None
    if start is None:
        start = problem.initial_guess if problem.initial_guess is not None else lo + 0.5 * width
    mean = (problem.clip(np.asarray(start, dtype=float)) - lo) / width
    w = np.asarray(config.weights)
    lam, mu, mu_eff = config.lam, config.mu, config.mu_eff
    cc, cs, ds, ccov, mucov = config.c_c, config.c_sigma, config.d_sigma, config.c_cov, config.mu_cov
    sigma = config.initial_sigma
    C = np.eye(n)
    B, D = np.eye(n), np.ones(n)
    p_c, p_s = np.zeros(n), np.zeros(n)
    chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))
    gen = stalled = 0
    try:
        if explicit:
            ev(lo + mean * width)
        while sigma * math.sqrt(float(np.max(np.diag(C)))) >= SIGMA_STOP and stalled < STALL_GENERATIONS:
            before = ev.count
            ys = np.empty((lam, n))
            zs = np.empty((lam, n))
            fs = np.empty(lam)
            for k in range(lam):
                for _ in range(MAX_RESAMPLES + 1):
                    y = B @ (D * rng.standard_normal(n))
                    z = mean + sigma * y
                    if np.all((z >= 0) & (z <= 1)):
                        break
                z = np.clip(z, 0.0, 1.0)
                zs[k] = z
                ys[k] = (z - mean) / sigma
                fs[k] = ev(lo + z * width)
            stalled = stalled + 1 if ev.count == before else 0
            order = np.argsort(fs, kind="stable")[:mu]
            y_w = w @ ys[order]
            mean = mean + sigma * y_w
            gen += 1
            inv_sqrt = B @ np.diag(1 / D) @ B.T
            p_s = (1 - cs) * p_s + math.sqrt(cs * (2 - cs) * mu_eff) * (inv_sqrt @ y_w)
            h_s = (np.linalg.norm(p_s) / math.sqrt(1 - (1 - cs) ** (2 * gen))
                   < (1.4 + 2 / (n + 1)) * chi_n)
            p_c = (1 - cc) * p_c + h_s * math.sqrt(cc * (2 - cc) * mu_eff) * y_w
            rank_mu = (ys[order].T * w) @ ys[order]
            C = ((1 - ccov) * C + ccov / mucov * (np.outer(p_c, p_c) + (not h_s) * cc * (2 - cc) * C)
                 + ccov * (1 - 1 / mucov) * rank_mu)
            sigma *= math.exp((cs / ds) * (np.linalg.norm(p_s) / chi_n - 1))
            C = 0.5 * (C + C.T)
            evals, B = np.linalg.eigh(C)
            floor = EIG_FLOOR * float(np.trace(C))
            if np.any(evals < floor):
                evals = np.maximum(evals, floor)
                C = (B * evals) @ B.T
            D = np.sqrt(evals)
    except BudgetExhausted:
        pass
    return ev.result(seed)
