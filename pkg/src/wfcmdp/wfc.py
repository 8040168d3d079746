"""Superposition grid with observation and constraint propagation.

A Wave holds, for every cell, the set of tiles that can still legally be
placed there. Collapsing a cell to one tile triggers worklist arc
consistency; if any cell's candidate set empties, the episode is truncated
and a Contradiction describes where.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .tileset import TileSet


@dataclass(frozen=True)
class Contradiction:
    cell: tuple[int, int]
    step: int


class Wave:
    def __init__(self, dims: tuple[int, int], ts: TileSet):
        rows, cols = dims
        if rows < 1 or cols < 1:
            raise ValueError(f"wave dims must be positive, got {dims}")
        self.dims = (int(rows), int(cols))
        self.ts = ts
        self.cands = np.ones((rows, cols, ts.n_tiles), bool)
        self.counts = np.full((rows, cols), ts.n_tiles, np.int16)
        self.grid = np.full((rows, cols), -1, np.int32)
        self.n_collapsed = 0
        self.contradiction: Contradiction | None = None

    @property
    def fully_collapsed(self) -> bool:
        return self.n_collapsed == self.dims[0] * self.dims[1]

    def candidates(self, cell: tuple[int, int]) -> np.ndarray:
        return self.cands[cell[0], cell[1]].copy()


def init_wave(dims: tuple[int, int], ts: TileSet) -> Wave:
    """Fresh wave: every cell admits the full tile set."""
    return Wave(dims, ts)


def select_next_cell(wave: Wave) -> tuple[int, int]:
    """Uncollapsed cell with the fewest candidates; ties resolve to the
    smallest row, then smallest column."""
    if wave.fully_collapsed:
        raise ValueError("wave is fully collapsed; nothing to select")
    masked = np.where(wave.grid < 0, wave.counts.astype(np.int32), 1 << 30)
    flat = int(masked.argmin())
    return divmod(flat, wave.dims[1])


def legal_tiles(wave: Wave, cell: tuple[int, int]) -> np.ndarray:
    """Boolean mask over tile ids that may be placed at `cell`."""
    r, c = cell
    if wave.grid[r, c] >= 0:
        raise ValueError(f"cell {cell} is already collapsed")
    return wave.cands[r, c].copy()


def collapse_and_propagate(
    wave: Wave, cell: tuple[int, int], tile: int
) -> Contradiction | None:
    """Fix `cell` to `tile` and run constraint propagation to fixpoint.

    Returns None on success. If propagation empties some cell's candidate
    set, the wave is left truncated and the Contradiction is returned.
    Collapsing to a tile outside the cell's candidate set is a caller bug
    and raises ValueError instead.
    """
    r, c = cell
    if wave.contradiction is not None:
        raise ValueError("wave is truncated by an earlier contradiction")
    if wave.grid[r, c] >= 0:
        raise ValueError(f"cell {cell} is already collapsed")
    if not wave.cands[r, c, tile]:
        raise ValueError(f"tile {tile} is not a candidate at cell {cell}")

    step = wave.n_collapsed
    wave.cands[r, c, :] = False
    wave.cands[r, c, tile] = True
    wave.counts[r, c] = 1
    wave.grid[r, c] = tile
    wave.n_collapsed += 1

    ok, bad_r, bad_c = kernels.ACTIVE.propagate(
        wave.cands, wave.counts, wave.ts.allowed, r, c
    )
    if not ok:
        wave.contradiction = Contradiction(cell=(int(bad_r), int(bad_c)), step=step)
        return wave.contradiction
    return None
