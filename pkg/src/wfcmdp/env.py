"""Episodic decision-process wrapper around the collapse loop.

Each action supplies one value per tile in [0, 1]; illegal tiles are masked
out and the argmax of the rest picks the tile for the cell the wave selects
next. Rewards are sparse: 0 for every intermediate step, the objective score
of the finished map on termination, and a fixed large penalty when
propagation contradicts and truncates the episode.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .objectives import ObjectiveSpec
from .tileset import TileSet
from .wfc import Contradiction, collapse_and_propagate, init_wave, legal_tiles, select_next_cell

CONTRADICTION_REWARD = -1000.0


class Layout(str, Enum):
    DIRECT_MAP = "direct_map"  # per-cell decode, no collapse loop
    SEQ1D = "seq1d"            # action row t applies at timestep t
    GRID2D = "grid2d"          # action row for cell (r, c) applies when (r, c) collapses


@dataclass(frozen=True)
class EnvState:
    grid: np.ndarray
    next_cell: tuple[int, int] | None
    t: int


@dataclass(frozen=True)
class StepOutcome:
    state: EnvState
    reward: float
    terminated: bool
    truncated: bool


def decode_action(values: np.ndarray, mask: np.ndarray) -> int:
    """Argmax of `values` restricted to indices where `mask` is true,
    smallest index on ties. The mask must admit at least one tile."""
    if not mask.any():
        raise ValueError("no legal tiles to decode (unreported contradiction?)")
    return int(np.where(mask, values, -1.0).argmax())


class WfcEnv:
    """Single-episode environment; call reset() to begin a new episode."""

    def __init__(self, dims: tuple[int, int], ts: TileSet, objective: ObjectiveSpec):
        self.dims = (int(dims[0]), int(dims[1]))
        self.ts = ts
        self.objective = objective
        self._wave = None
        self._done = True

    def reset(self) -> EnvState:
        self._wave = init_wave(self.dims, self.ts)
        self._done = False
        return self._state()

    def _state(self) -> EnvState:
        wave = self._wave
        done = wave.fully_collapsed or wave.contradiction is not None
        return EnvState(
            grid=wave.grid.copy(),
            next_cell=None if done else select_next_cell(wave),
            t=wave.n_collapsed,
        )

    def step(self, values: np.ndarray) -> StepOutcome:
        if self._done or self._wave is None:
            raise ValueError("episode is over; call reset()")
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (self.ts.n_tiles,):
            raise ValueError(
                f"action must have {self.ts.n_tiles} entries, got {values.shape}"
            )
        if not np.isfinite(values).all() or (values < 0).any() or (values > 1).any():
            raise ValueError("action values must be finite and within [0, 1]")

        wave = self._wave
        cell = select_next_cell(wave)
        tile = decode_action(values, legal_tiles(wave, cell))
        contradiction = collapse_and_propagate(wave, cell, tile)

        if contradiction is not None:
            self._done = True
            return StepOutcome(self._state(), CONTRADICTION_REWARD, False, True)
        if wave.fully_collapsed:
            self._done = True
            reward = self.objective.score(wave.grid, self.ts)
            return StepOutcome(self._state(), reward, True, False)
        return StepOutcome(self._state(), 0.0, False, False)


@dataclass(frozen=True)
class RolloutResult:
    grid: np.ndarray | None
    contradiction: Contradiction | None
    reward: float
    steps: int

    @property
    def completed(self) -> bool:
        return self.contradiction is None


def rollout(
    ts: TileSet,
    dims: tuple[int, int],
    objective: ObjectiveSpec,
    actions: np.ndarray,
    layout: Layout,
) -> RolloutResult:
    """Run one full episode from a fixed action table.

    `actions` must be (rows*cols, n_tiles). A pure function of its inputs:
    identical arguments give identical results.
    """
    rows, cols = dims
    layout = Layout(layout)
    if layout is Layout.DIRECT_MAP:
        raise ValueError("direct_map genomes decode without a rollout")
    actions = np.ascontiguousarray(actions, dtype=np.float64)
    if actions.shape != (rows * cols, ts.n_tiles):
        raise ValueError(
            f"expected {(rows * cols, ts.n_tiles)} action table, got {actions.shape}"
        )
    grid, status, bad_r, bad_c, steps = kernels.ACTIVE.run_rollout(
        actions, layout is Layout.GRID2D, ts.allowed, rows, cols
    )
    if status == kernels.ROLLOUT_CONTRADICTION:
        contradiction = Contradiction(cell=(int(bad_r), int(bad_c)), step=steps - 1)
        return RolloutResult(None, contradiction, CONTRADICTION_REWARD, int(steps))
    return RolloutResult(grid, None, objective.score(grid, ts), int(steps))
