"""Hot numeric kernels: constraint propagation, episode rollout, grid graph
measurements.

Each kernel has a loop-style implementation (compiled with numba when the
'numba' backend is active) and a vectorized pure-numpy implementation. See
`backend` for how the active flavor is chosen. `get_kernels(name)` builds a
specific flavor on demand, which is what the parity tests and the benchmark
use to compare both.

Conventions shared by every kernel:

- grids are (rows, cols) int32, -1 marking an undecided cell
- candidate sets are (rows, cols, n_tiles) bool
- `counts` caches candidates-per-cell as (rows, cols) int16
- adjacency is (n_tiles, 4, n_tiles) bool, `allowed[a, d, b]` meaning tile b
  may sit in direction d from tile a, directions ordered N=0, E=1, S=2, W=3
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .backend import resolve_backend

N, E, S, W = 0, 1, 2, 3
ROLLOUT_DONE = 0
ROLLOUT_CONTRADICTION = 1

_BIG = 1 << 30


# ---------------------------------------------------------------------------
# loop implementations (numba-compatible; plain python if jitted flavor is off)
# ---------------------------------------------------------------------------

def _propagate_loops(cands, counts, allowed, seed_r, seed_c):
    """Worklist arc consistency from one changed cell.

    Prunes candidates with no compatible neighbor candidate until fixpoint,
    mutating `cands`/`counts`. Returns (ok, bad_r, bad_c); on a contradiction
    ok is False and (bad_r, bad_c) is the cell whose set emptied first in
    this worklist order.
    """
    rows, cols, n_tiles = cands.shape
    cap = rows * cols
    queue_r = np.empty(cap, np.int32)
    queue_c = np.empty(cap, np.int32)
    queued = np.zeros((rows, cols), np.bool_)
    head = 0
    size = 0
    queue_r[0] = seed_r
    queue_c[0] = seed_c
    queued[seed_r, seed_c] = True
    size = 1
    tail = 1

    while size > 0:
        r = queue_r[head]
        c = queue_c[head]
        head = (head + 1) % cap
        size -= 1
        queued[r, c] = False
        for d in range(4):
            if d == 0:
                nr, nc = r - 1, c
            elif d == 1:
                nr, nc = r, c + 1
            elif d == 2:
                nr, nc = r + 1, c
            else:
                nr, nc = r, c - 1
            if nr < 0 or nr >= rows or nc < 0 or nc >= cols:
                continue
            # drop neighbor candidates with no support in this cell
            changed = False
            left = 0
            for t in range(n_tiles):
                if not cands[nr, nc, t]:
                    continue
                supported = False
                for u in range(n_tiles):
                    if cands[r, c, u] and allowed[u, d, t]:
                        supported = True
                        break
                if supported:
                    left += 1
                else:
                    cands[nr, nc, t] = False
                    changed = True
            if changed:
                counts[nr, nc] = left
                if left == 0:
                    return False, nr, nc
                if not queued[nr, nc]:
                    queue_r[tail] = nr
                    queue_c[tail] = nc
                    queued[nr, nc] = True
                    tail = (tail + 1) % cap
                    size += 1
    return True, -1, -1


# Bound to the jitted propagate before the jitted rollout is compiled; the
# numpy flavor never calls through this.
_propagate_ll = _propagate_loops


def _run_rollout_loops(actions, by_cell, allowed, rows, cols):
    """One full episode: repeatedly pick the fewest-candidate cell (row-major
    tie-break), argmax-decode the matching action over legal tiles (smallest
    id on ties), collapse, propagate.

    `actions` is (rows*cols, n_tiles) float64; when `by_cell` the action row
    is indexed by the chosen cell's flat coordinate, otherwise by timestep.
    Returns (grid, status, bad_r, bad_c, steps).
    """
    n_tiles = allowed.shape[0]
    cands = np.ones((rows, cols, n_tiles), np.bool_)
    counts = np.full((rows, cols), n_tiles, np.int16)
    grid = np.full((rows, cols), -1, np.int32)
    total = rows * cols

    for step in range(total):
        best_count = n_tiles + 1
        br = -1
        bc = -1
        for r in range(rows):
            for c in range(cols):
                if grid[r, c] >= 0:
                    continue
                k = counts[r, c]
                if k < best_count:
                    best_count = k
                    br = r
                    bc = c
        ai = br * cols + bc if by_cell else step
        tile = -1
        best_val = -1.0
        for t in range(n_tiles):
            if cands[br, bc, t] and actions[ai, t] > best_val:
                best_val = actions[ai, t]
                tile = t
        for t in range(n_tiles):
            cands[br, bc, t] = t == tile
        counts[br, bc] = 1
        grid[br, bc] = tile
        ok, bad_r, bad_c = _propagate_ll(cands, counts, allowed, br, bc)
        if not ok:
            return grid, ROLLOUT_CONTRADICTION, bad_r, bad_c, step + 1
    return grid, ROLLOUT_DONE, -1, -1, total


def _grid_diameter_loops(mask):
    """Longest shortest path (edge count) over 4-connected True cells,
    maximized across components; 0 when fewer than two cells."""
    rows, cols = mask.shape
    n = 0
    for r in range(rows):
        for c in range(cols):
            if mask[r, c]:
                n += 1
    if n <= 1:
        return 0
    dist = np.empty((rows, cols), np.int32)
    queue_r = np.empty(n, np.int32)
    queue_c = np.empty(n, np.int32)
    best = 0
    for sr in range(rows):
        for sc in range(cols):
            if not mask[sr, sc]:
                continue
            for r in range(rows):
                for c in range(cols):
                    dist[r, c] = -1
            dist[sr, sc] = 0
            queue_r[0] = sr
            queue_c[0] = sc
            head = 0
            tail = 1
            while head < tail:
                r = queue_r[head]
                c = queue_c[head]
                head += 1
                d = dist[r, c]
                if d > best:
                    best = d
                nd = d + 1
                if r > 0 and mask[r - 1, c] and dist[r - 1, c] < 0:
                    dist[r - 1, c] = nd
                    queue_r[tail] = r - 1
                    queue_c[tail] = c
                    tail += 1
                if r + 1 < rows and mask[r + 1, c] and dist[r + 1, c] < 0:
                    dist[r + 1, c] = nd
                    queue_r[tail] = r + 1
                    queue_c[tail] = c
                    tail += 1
                if c > 0 and mask[r, c - 1] and dist[r, c - 1] < 0:
                    dist[r, c - 1] = nd
                    queue_r[tail] = r
                    queue_c[tail] = c - 1
                    tail += 1
                if c + 1 < cols and mask[r, c + 1] and dist[r, c + 1] < 0:
                    dist[r, c + 1] = nd
                    queue_r[tail] = r
                    queue_c[tail] = c + 1
                    tail += 1
    return best


def _count_components_loops(mask):
    """Number of 4-connected components of True cells."""
    rows, cols = mask.shape
    seen = np.zeros((rows, cols), np.bool_)
    queue_r = np.empty(rows * cols, np.int32)
    queue_c = np.empty(rows * cols, np.int32)
    count = 0
    for sr in range(rows):
        for sc in range(cols):
            if not mask[sr, sc] or seen[sr, sc]:
                continue
            count += 1
            seen[sr, sc] = True
            queue_r[0] = sr
            queue_c[0] = sc
            head = 0
            tail = 1
            while head < tail:
                r = queue_r[head]
                c = queue_c[head]
                head += 1
                if r > 0 and mask[r - 1, c] and not seen[r - 1, c]:
                    seen[r - 1, c] = True
                    queue_r[tail] = r - 1
                    queue_c[tail] = c
                    tail += 1
                if r + 1 < rows and mask[r + 1, c] and not seen[r + 1, c]:
                    seen[r + 1, c] = True
                    queue_r[tail] = r + 1
                    queue_c[tail] = c
                    tail += 1
                if c > 0 and mask[r, c - 1] and not seen[r, c - 1]:
                    seen[r, c - 1] = True
                    queue_r[tail] = r
                    queue_c[tail] = c - 1
                    tail += 1
                if c + 1 < cols and mask[r, c + 1] and not seen[r, c + 1]:
                    seen[r, c + 1] = True
                    queue_r[tail] = r
                    queue_c[tail] = c + 1
                    tail += 1
    return count


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def _propagate_numpy(cands, counts, allowed, seed_r, seed_c):
    """Synchronous support sweeps to the same arc-consistent fixpoint as the
    worklist flavor. The contradiction cell, if any, is the row-major first
    cell emptied in the sweep where emptiness first appears."""
    rows, cols, n_tiles = cands.shape
    from_north = allowed[:, S, :].astype(np.uint8)
    from_south = allowed[:, N, :].astype(np.uint8)
    from_west = allowed[:, E, :].astype(np.uint8)
    from_east = allowed[:, W, :].astype(np.uint8)

    while True:
        c8 = cands.astype(np.uint8)
        supported = np.ones_like(cands)
        if rows > 1:
            supported[1:] &= (c8[:-1].reshape(-1, n_tiles) @ from_north
                              ).reshape(rows - 1, cols, n_tiles) > 0
            supported[:-1] &= (c8[1:].reshape(-1, n_tiles) @ from_south
                               ).reshape(rows - 1, cols, n_tiles) > 0
        if cols > 1:
            supported[:, 1:] &= (c8[:, :-1].reshape(-1, n_tiles) @ from_west
                                 ).reshape(rows, cols - 1, n_tiles) > 0
            supported[:, :-1] &= (c8[:, 1:].reshape(-1, n_tiles) @ from_east
                                  ).reshape(rows, cols - 1, n_tiles) > 0
        new = cands & supported
        if np.array_equal(new, cands):
            break
        cands[:] = new
        empty = ~cands.any(axis=2)
        if empty.any():
            counts[:] = cands.sum(axis=2, dtype=np.int16)
            bad = np.argwhere(empty)[0]
            return False, int(bad[0]), int(bad[1])
    counts[:] = cands.sum(axis=2, dtype=np.int16)
    return True, -1, -1


def _run_rollout_numpy(actions, by_cell, allowed, rows, cols):
    n_tiles = allowed.shape[0]
    cands = np.ones((rows, cols, n_tiles), np.bool_)
    counts = np.full((rows, cols), n_tiles, np.int16)
    grid = np.full((rows, cols), -1, np.int32)
    total = rows * cols

    for step in range(total):
        masked = np.where(grid < 0, counts.astype(np.int32), _BIG)
        flat = int(masked.argmin())
        r, c = divmod(flat, cols)
        ai = flat if by_cell else step
        vals = np.where(cands[r, c], actions[ai], -1.0)
        tile = int(vals.argmax())
        cands[r, c, :] = False
        cands[r, c, tile] = True
        counts[r, c] = 1
        grid[r, c] = tile
        ok, bad_r, bad_c = _propagate_numpy(cands, counts, allowed, r, c)
        if not ok:
            return grid, ROLLOUT_CONTRADICTION, bad_r, bad_c, step + 1
    return grid, ROLLOUT_DONE, -1, -1, total


def _grid_diameter_numpy(mask):
    coords = np.argwhere(mask)
    n = len(coords)
    if n <= 1:
        return 0
    frontier = np.zeros((n,) + mask.shape, np.bool_)
    frontier[np.arange(n), coords[:, 0], coords[:, 1]] = True
    seen = frontier.copy()
    depth = 0
    while True:
        grow = np.zeros_like(frontier)
        grow[:, 1:, :] |= frontier[:, :-1, :]
        grow[:, :-1, :] |= frontier[:, 1:, :]
        grow[:, :, 1:] |= frontier[:, :, :-1]
        grow[:, :, :-1] |= frontier[:, :, 1:]
        grow &= mask[None, :, :]
        grow &= ~seen
        if not grow.any():
            return depth
        depth += 1
        seen |= grow
        frontier = grow


def _count_components_numpy(mask):
    if not mask.any():
        return 0
    rows, cols = mask.shape
    big = rows * cols
    labels = np.where(mask, np.arange(big).reshape(rows, cols), big)
    while True:
        neighbor_min = np.full_like(labels, big)
        neighbor_min[1:, :] = np.minimum(neighbor_min[1:, :], labels[:-1, :])
        neighbor_min[:-1, :] = np.minimum(neighbor_min[:-1, :], labels[1:, :])
        neighbor_min[:, 1:] = np.minimum(neighbor_min[:, 1:], labels[:, :-1])
        neighbor_min[:, :-1] = np.minimum(neighbor_min[:, :-1], labels[:, 1:])
        new = np.where(mask, np.minimum(labels, neighbor_min), big)
        if np.array_equal(new, labels):
            return len(np.unique(labels[mask]))
        labels = new


# ---------------------------------------------------------------------------
# flavor assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Kernels:
    name: str
    propagate: Callable
    run_rollout: Callable
    grid_diameter: Callable
    count_components: Callable


_built: dict[str, Kernels] = {}


def _build_numba() -> Kernels:
    global _propagate_ll
    from numba import njit

    jit = njit(cache=True)
    propagate = jit(_propagate_loops)
    _propagate_ll = propagate
    return Kernels(
        name="numba",
        propagate=propagate,
        run_rollout=jit(_run_rollout_loops),
        grid_diameter=jit(_grid_diameter_loops),
        count_components=jit(_count_components_loops),
    )


def _build_numpy() -> Kernels:
    return Kernels(
        name="numpy",
        propagate=_propagate_numpy,
        run_rollout=_run_rollout_numpy,
        grid_diameter=_grid_diameter_numpy,
        count_components=_count_components_numpy,
    )


def get_kernels(name: str) -> Kernels:
    """Build (and memoize) one kernel flavor by name."""
    if name not in _built:
        if name == "numba":
            _built[name] = _build_numba()
        elif name == "numpy":
            _built[name] = _build_numpy()
        else:
            raise ValueError(f"unknown kernel flavor {name!r}")
    return _built[name]


ACTIVE = get_kernels(resolve_backend())

propagate = ACTIVE.propagate
run_rollout = ACTIVE.run_rollout
grid_diameter = ACTIVE.grid_diameter
count_components = ACTIVE.count_components
