"""MCS settings and the seven named configurations."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

BOUNDARY_MID = "boundary_mid"
INTERIOR = "interior"
LINE_SEARCH = "line_search"
BOUNDARY_GUESS = "boundary_guess"
INTERIOR_GUESS = "interior_guess"

STRATEGIES = (BOUNDARY_MID, INTERIOR, LINE_SEARCH, BOUNDARY_GUESS, INTERIOR_GUESS)
GUESS_STRATEGIES = (BOUNDARY_GUESS, INTERIOR_GUESS)


@dataclass(frozen=True)
class McsConfig:
    init_strategy: str = BOUNDARY_MID
    s_max: int = 20
    initial_guess: Optional[np.ndarray] = None
    local_search_enabled: bool = True
    local_max_steps: int = 50
    local_gamma: float = 0.01
    nloc: int = 5
    smaxls: int = 25
    # a new level-s_max base point seeds a local search when within this relative gap of the best
    local_trigger: float = 0.1

    def __post_init__(self):
        if self.init_strategy not in STRATEGIES:
            raise ValueError(f"unknown init strategy {self.init_strategy!r}")
        if self.s_max < 3:
            raise ValueError("s_max must be at least 3")
        if self.local_max_steps < 0:
            raise ValueError("local_max_steps must be non-negative")
        if not 0 < self.local_gamma < 1:
            raise ValueError("local_gamma must lie in (0, 1)")
        if self.nloc < 1 or self.smaxls < 3:
            raise ValueError("need nloc >= 1 and smaxls >= 3")

    @property
    def local_search_active(self) -> bool:
        return self.local_search_enabled and self.local_max_steps > 0

    def with_guess(self, x0) -> "McsConfig":
        """Copy with ``x0`` as the initial guess; plain lists switch to their guess variants."""
        strategy = {BOUNDARY_MID: BOUNDARY_GUESS, INTERIOR: INTERIOR_GUESS}.get(self.init_strategy, self.init_strategy)
        return replace(self, init_strategy=strategy, initial_guess=np.asarray(x0, dtype=float).copy())


def preset(number: int, n: int, x0=None) -> McsConfig:
    """Configuration ``MCS-<number>`` for an ``n``-dimensional problem.

    1: boundary and midpoints, s_max = 5n + 10; 2: interior sixths;
    3: line-search list; 4: boundaries and the guess; 5: interior sixths and
    the guess; 6: as 4 with s_max = 10n; 7: as 4 without local search.
    """
    base = dict(s_max=5 * n + 10)
    guess = None if x0 is None else np.asarray(x0, dtype=float).copy()
    table = {
        1: dict(init_strategy=BOUNDARY_MID),
        2: dict(init_strategy=INTERIOR),
        3: dict(init_strategy=LINE_SEARCH, initial_guess=guess),
        4: dict(init_strategy=BOUNDARY_GUESS, initial_guess=guess),
        5: dict(init_strategy=INTERIOR_GUESS, initial_guess=guess),
        6: dict(init_strategy=BOUNDARY_GUESS, initial_guess=guess, s_max=max(10 * n, 3)),
        7: dict(init_strategy=BOUNDARY_GUESS, initial_guess=guess, local_search_enabled=False,
                local_max_steps=0),
    }
    if number not in table:
        raise ValueError(f"MCS configurations are numbered 1-7, got {number}")
    return McsConfig(**{**base, **table[number]})
