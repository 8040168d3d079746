"""Tile definitions, semantic categories, and edge-label adjacency.

A tileset is loaded from a `.tileset.json` document. Adjacency is never
listed explicitly: tile b may sit in direction d from tile a exactly when
a's edge label on side d equals b's label on the opposite side. That keeps
the relation symmetric by construction and the config file small.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum
from importlib import resources
from pathlib import Path

import numpy as np

from .kernels import E, N, S, W

OPPOSITE = {N: S, E: W, S: N, W: E}
DIRECTION_NAMES = ("north", "east", "south", "west")


class Category(IntEnum):
    PATH = 0
    GRASS = 1
    FLOWER = 2
    WATER = 3
    HILL = 4
    SHORE = 5


_CATEGORY_BY_NAME = {c.name.lower(): c for c in Category}


class TilesetError(ValueError):
    """Raised when a tileset document is malformed or self-inconsistent."""


@dataclass(frozen=True)
class Tile:
    id: int
    name: str
    category: Category
    edge_labels: tuple[str, str, str, str]  # north, east, south, west
    is_water_center: bool
    color: tuple[int, int, int]


class TileSet:
    """Immutable tile collection with a precomputed adjacency relation.

    `allowed` is a (n_tiles, 4, n_tiles) bool array; `allowed[a, d, b]` says
    tile b may be the neighbor of tile a in direction d.
    """

    def __init__(self, tiles: list[Tile]):
        self.tiles = tuple(tiles)
        self.n_tiles = len(tiles)
        self.names = tuple(t.name for t in tiles)
        self.categories = np.array([t.category for t in tiles], np.int8)
        self.water_center = np.array([t.is_water_center for t in tiles], bool)
        self.colors = np.array([t.color for t in tiles], np.uint8)
        self.allowed = self._build_allowed()
        self.allowed.setflags(write=False)
        self.categories.setflags(write=False)
        self.water_center.setflags(write=False)

    def _build_allowed(self) -> np.ndarray:
        n = self.n_tiles
        allowed = np.zeros((n, 4, n), bool)
        for a in self.tiles:
            for d in range(4):
                for b in self.tiles:
                    if a.edge_labels[d] == b.edge_labels[OPPOSITE[d]]:
                        allowed[a.id, d, b.id] = True
        return allowed

    def category_mask(self, grid: np.ndarray, categories) -> np.ndarray:
        """Boolean grid marking cells whose tile category is in `categories`."""
        table = np.zeros(self.n_tiles, bool)
        for cat in categories:
            table[self.categories == int(cat)] = True
        return table[grid]

    def index(self, name: str) -> int:
        return self.names.index(name)

    def __len__(self) -> int:
        return self.n_tiles


def _parse_tile(entry: dict, tile_id: int) -> Tile:
    try:
        name = entry["name"]
        category_raw = entry["category"]
        edges = entry["edges"]
    except (KeyError, TypeError) as exc:
        raise TilesetError(f"tile #{tile_id}: missing required field: {exc}")
    if not isinstance(name, str) or not name:
        raise TilesetError(f"tile #{tile_id}: name must be a non-empty string")
    category = _CATEGORY_BY_NAME.get(str(category_raw).lower())
    if category is None:
        raise TilesetError(f"tile {name!r}: unknown category {category_raw!r}")
    if not isinstance(edges, list) or len(edges) != 4:
        raise TilesetError(f"tile {name!r}: edges must list 4 labels (n, e, s, w)")
    labels = tuple(str(e) for e in edges)
    color = tuple(entry.get("color", (128, 128, 128)))
    if len(color) != 3 or any(not 0 <= int(v) <= 255 for v in color):
        raise TilesetError(f"tile {name!r}: color must be 3 components in 0-255")
    return Tile(
        id=tile_id,
        name=name,
        category=category,
        edge_labels=labels,
        is_water_center=bool(entry.get("water_center", False)),
        color=tuple(int(v) for v in color),
    )


def _check_water_center(tiles: list[Tile]) -> None:
    flagged = [t for t in tiles if t.is_water_center]
    for t in flagged:
        if t.category is not Category.WATER:
            raise TilesetError(f"tile {t.name!r}: water_center on non-water tile")
        if len(set(t.edge_labels)) != 1:
            raise TilesetError(
                f"tile {t.name!r}: water_center requires all 4 edges equal"
            )
    interior_labels = {t.edge_labels[0] for t in flagged}
    for t in tiles:
        if (
            not t.is_water_center
            and t.category is Category.WATER
            and len(set(t.edge_labels)) == 1
            and t.edge_labels[0] in interior_labels
        ):
            raise TilesetError(
                f"tile {t.name!r}: matches the water-interior label but is "
                "not flagged water_center"
            )


def load_tileset(source) -> TileSet:
    """Load and validate a tileset from a path, JSON text, or parsed dict.

    Raises TilesetError on parse failure, duplicate names, unknown
    categories, malformed edges, inconsistent water-center flags, or dead
    tiles (a tile with no permitted neighbor in some direction).
    """
    if isinstance(source, dict):
        doc = source
    else:
        if isinstance(source, Path) or (
            isinstance(source, str) and "\n" not in source and source.endswith(".json")
        ):
            try:
                text = Path(source).read_text()
            except OSError as exc:
                raise TilesetError(f"cannot read tileset file: {exc}")
        else:
            text = source
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TilesetError(f"tileset is not valid JSON: {exc}")

    entries = doc.get("tiles") if isinstance(doc, dict) else None
    if not isinstance(entries, list) or not entries:
        raise TilesetError("tileset document needs a non-empty 'tiles' array")

    tiles = [_parse_tile(entry, i) for i, entry in enumerate(entries)]
    seen: set[str] = set()
    for t in tiles:
        if t.name in seen:
            raise TilesetError(f"duplicate tile name {t.name!r}")
        seen.add(t.name)
    _check_water_center(tiles)

    ts = TileSet(tiles)
    for t in tiles:
        for d in range(4):
            if not ts.allowed[t.id, d].any():
                raise TilesetError(
                    f"dead tile {t.name!r}: no permitted neighbor to the "
                    f"{DIRECTION_NAMES[d]}"
                )
    return ts


def desk_tileset_path() -> Path:
    """Path of the bundled desk tileset."""
    return Path(resources.files("wfcmdp").joinpath("data/desk.tileset.json"))


def load_desk_tileset() -> TileSet:
    return load_tileset(desk_tileset_path())


def count_violations(grid: np.ndarray, ts: TileSet) -> int:
    """Number of grid edges (4-connectivity, each unordered pair once) whose
    tile pair is not permitted by the adjacency relation.

    The map must be fully collapsed (no -1 entries).
    """
    if (grid < 0).any():
        raise ValueError("map has uncollapsed cells")
    total = 0
    if grid.shape[1] > 1:
        total += int(np.sum(~ts.allowed[grid[:, :-1], E, grid[:, 1:]]))
    if grid.shape[0] > 1:
        total += int(np.sum(~ts.allowed[grid[:-1, :], S, grid[1:, :]]))
    return total
