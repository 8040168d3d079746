"""Map scoring: path-length target, river and field biome shapes, hybrids.

Every objective tops out at exactly 0, so optimizers maximize toward 0 and
hybrid scores are plain sums. Path lengths are measured in edges (steps)
over the 4-connected subgraph of matching-category cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .tileset import Category, TileSet

MIN_RIVER_SPAN = 35
MAX_LAND_REGIONS = 3
MIN_GRASS_PCT = 20.0
MIN_FLOWER_PCT = 20.0
# an empty river scores like a maximally short one instead of earning the
# (1 - regions) bonus for having zero regions
NO_RIVER_PENALTY = -35.0


class ObjectiveKind(str, Enum):
    BINARY = "binary"
    RIVER = "river"
    FIELD = "field"
    HYBRID_RIVER_BINARY = "hybrid_river_binary"
    HYBRID_FIELD_BINARY = "hybrid_field_binary"

    @property
    def needs_target(self) -> bool:
        return self in (
            ObjectiveKind.BINARY,
            ObjectiveKind.HYBRID_RIVER_BINARY,
            ObjectiveKind.HYBRID_FIELD_BINARY,
        )


@dataclass(frozen=True)
class ObjectiveSpec:
    kind: ObjectiveKind
    target_path_length: int = 0

    def __post_init__(self):
        if self.target_path_length < 0:
            raise ValueError("target path length must be non-negative")

    def score(self, grid: np.ndarray, ts: TileSet) -> float:
        kind = self.kind
        if kind is ObjectiveKind.BINARY:
            return binary_objective(grid, ts, self.target_path_length)
        if kind is ObjectiveKind.RIVER:
            return river_objective(grid, ts)
        if kind is ObjectiveKind.FIELD:
            return field_objective(grid, ts)
        if kind is ObjectiveKind.HYBRID_RIVER_BINARY:
            return hybrid_objective(grid, ts, self.target_path_length, "river")
        return hybrid_objective(grid, ts, self.target_path_length, "field")


@dataclass
class BiomeMetrics:
    water_regions: int = 0
    water_span: int = 0
    water_centers: int = 0
    land_regions: int = 0
    water_tiles: int = 0
    hill_tiles: int = 0
    grass_pct: float = 0.0
    flower_pct: float = 0.0


def _require_collapsed(grid: np.ndarray) -> None:
    if (grid < 0).any():
        raise ValueError("objective needs a fully collapsed map")


def longest_shortest_path(grid: np.ndarray, ts: TileSet, traversable) -> int:
    """Diameter of the subgraph induced by cells whose category is in
    `traversable`: the maximum over all cell pairs of the shortest-path edge
    count, taken across connected components. 0 when at most one cell
    qualifies."""
    _require_collapsed(grid)
    mask = ts.category_mask(grid, traversable)
    return int(kernels.ACTIVE.grid_diameter(mask))


def binary_objective(grid: np.ndarray, ts: TileSet, target: int) -> float:
    """0 when the path-cell diameter equals `target`, else minus the gap."""
    span = longest_shortest_path(grid, ts, (Category.PATH,))
    # leading 0.0 keeps exact hits from rounding to -0.0 in reports
    return 0.0 - float(abs(span - target))


def river_metrics(grid: np.ndarray, ts: TileSet) -> BiomeMetrics:
    _require_collapsed(grid)
    water = ts.category_mask(grid, (Category.WATER,))
    return BiomeMetrics(
        water_regions=int(kernels.ACTIVE.count_components(water)),
        water_span=int(kernels.ACTIVE.grid_diameter(water)),
        water_centers=int(ts.water_center[grid].sum()),
        land_regions=int(kernels.ACTIVE.count_components(~water)),
    )


def river_objective(grid: np.ndarray, ts: TileSet) -> float:
    """0 exactly for a single thin water region spanning at least
    MIN_RIVER_SPAN steps that splits the land into at most MAX_LAND_REGIONS
    pieces."""
    m = river_metrics(grid, ts)
    if m.water_regions == 0:
        base = NO_RIVER_PENALTY
    else:
        base = float(1 - m.water_regions)
    return 0.0 + (
        base
        + min(0.0, float(m.water_span - MIN_RIVER_SPAN))
        - float(m.water_centers)
        + min(0.0, float(MAX_LAND_REGIONS - m.land_regions))
    )


def field_metrics(grid: np.ndarray, ts: TileSet) -> BiomeMetrics:
    """Counts and percentages for the open-field score. Water counts include
    shore cells; percentages are taken over non-path cells (0 when the map
    has no non-path cells)."""
    _require_collapsed(grid)
    cats = ts.categories[grid]
    non_path = int((cats != Category.PATH).sum())
    grass = int((cats == Category.GRASS).sum())
    flowers = int((cats == Category.FLOWER).sum())
    return BiomeMetrics(
        water_tiles=int(
            ((cats == Category.WATER) | (cats == Category.SHORE)).sum()
        ),
        hill_tiles=int((cats == Category.HILL).sum()),
        grass_pct=100.0 * grass / non_path if non_path else 0.0,
        flower_pct=100.0 * flowers / non_path if non_path else 0.0,
    )


def field_objective(grid: np.ndarray, ts: TileSet) -> float:
    """0 exactly when the map has no water/shore and no hills and at least
    20% each of grass and flowers among non-path cells."""
    m = field_metrics(grid, ts)
    return 0.0 + (
        -float(m.water_tiles)
        - float(m.hill_tiles)
        + min(0.0, m.grass_pct - MIN_GRASS_PCT)
        + min(0.0, m.flower_pct - MIN_FLOWER_PCT)
    )


def hybrid_objective(grid: np.ndarray, ts: TileSet, target: int, biome: str) -> float:
    """Sum of the path-length score and one biome score."""
    if biome == "river":
        biome_score = river_objective(grid, ts)
    elif biome == "field":
        biome_score = field_objective(grid, ts)
    else:
        raise ValueError(f"unknown biome {biome!r}")
    return binary_objective(grid, ts, target) + biome_score
