"""Map file round-tripping and text/PPM rendering.

Map file format: a "rows cols" header line, then one line per row of
space-separated tile ids. The PPM output is binary P6 with each cell drawn
as a cell_pixel_size square of its tile's configured color; both formats are
byte-exact for given inputs.
"""

from __future__ import annotations

import numpy as np

from .tileset import TileSet


class MapFormatError(ValueError):
    """Raised when a map file or its tile ids are malformed."""


def format_map(grid: np.ndarray) -> str:
    rows, cols = grid.shape
    lines = [f"{rows} {cols}"]
    lines.extend(" ".join(str(int(v)) for v in row) for row in grid)
    return "\n".join(lines) + "\n"


def write_map(path: str, grid: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(format_map(grid))


def parse_map(text: str) -> np.ndarray:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise MapFormatError("empty map file")
    try:
        rows, cols = (int(v) for v in lines[0].split())
    except ValueError:
        raise MapFormatError(f"bad map header {lines[0]!r}; expected 'rows cols'")
    if len(lines) != rows + 1:
        raise MapFormatError(f"expected {rows} map rows, found {len(lines) - 1}")
    grid = np.empty((rows, cols), np.int32)
    for r, line in enumerate(lines[1:]):
        values = line.split()
        if len(values) != cols:
            raise MapFormatError(f"row {r} has {len(values)} entries, expected {cols}")
        try:
            grid[r] = [int(v) for v in values]
        except ValueError:
            raise MapFormatError(f"row {r} has non-integer tile ids")
    return grid


def read_map(path: str) -> np.ndarray:
    with open(path) as fh:
        return parse_map(fh.read())


def _check_ids(grid: np.ndarray, ts: TileSet) -> None:
    if (grid < 0).any() or (grid >= ts.n_tiles).any():
        bad = int(grid[(grid < 0) | (grid >= ts.n_tiles)][0])
        raise MapFormatError(f"unknown tile id {bad} for a {ts.n_tiles}-tile set")


def render_text(grid: np.ndarray) -> str:
    return "\n".join(" ".join(str(int(v)) for v in row) for row in grid) + "\n"


def render_ppm(grid: np.ndarray, ts: TileSet, cell_pixel_size: int = 8) -> bytes:
    """Binary P6 image, one cell_pixel_size square per cell."""
    if cell_pixel_size < 1:
        raise ValueError("cell_pixel_size must be >= 1")
    _check_ids(grid, ts)
    pixels = ts.colors[grid]  # (rows, cols, 3)
    pixels = np.repeat(np.repeat(pixels, cell_pixel_size, 0), cell_pixel_size, 1)
    height, width = pixels.shape[:2]
    return b"P6\n%d %d\n255\n" % (width, height) + pixels.tobytes()
