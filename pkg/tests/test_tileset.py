import numpy as np
import pytest

from wfcmdp.tileset import (
    Category,
    TilesetError,
    count_violations,
    load_tileset,
)

from conftest import make_tileset, oracle_adjacency, oracle_violations


def _doc(tiles):
    return {"tiles": tiles}


def _tile(name, category="grass", edges=("g", "g", "g", "g"), **extra):
    entry = {"name": name, "category": category, "edges": list(edges)}
    entry.update(extra)
    return entry


class TestLoadTileset:
    def test_single_tile_neighbors_itself_everywhere(self):
        ts = load_tileset(_doc([_tile("solo")]))
        assert ts.n_tiles == 1
        assert ts.allowed.all()

    def test_dead_tile_rejected(self):
        doc = _doc([
            _tile("a", edges=("g", "x", "g", "g")),
            _tile("b", edges=("g", "g", "g", "y")),
        ])
        with pytest.raises(TilesetError, match="dead tile"):
            load_tileset(doc)

    def test_duplicate_name_rejected(self):
        with pytest.raises(TilesetError, match="duplicate"):
            load_tileset(_doc([_tile("twin"), _tile("twin")]))

    def test_unknown_category_rejected(self):
        with pytest.raises(TilesetError, match="category"):
            load_tileset(_doc([_tile("odd", category="lava")]))

    def test_parse_failure(self):
        with pytest.raises(TilesetError, match="JSON"):
            load_tileset("{not json\n")

    def test_missing_edges_rejected(self):
        with pytest.raises(TilesetError, match="edges"):
            load_tileset(_doc([{"name": "a", "category": "grass", "edges": ["g", "g"]}]))

    def test_water_center_on_non_water_rejected(self):
        with pytest.raises(TilesetError, match="water_center"):
            load_tileset(_doc([_tile("fake", water_center=True)]))

    def test_water_center_needs_uniform_edges(self):
        doc = _doc([
            _tile("deep", category="water", edges=("w", "w", "w", "g"),
                  water_center=True),
            _tile("grass"),
        ])
        with pytest.raises(TilesetError, match="4 edges equal"):
            load_tileset(doc)

    def test_unflagged_water_interior_rejected(self):
        doc = _doc([
            _tile("deep", category="water", edges=("w", "w", "w", "w"),
                  water_center=True),
            _tile("deep2", category="water", edges=("w", "w", "w", "w")),
            _tile("cap_n", category="shore", edges=("w", "g", "g", "g")),
            _tile("cap_s", category="shore", edges=("g", "g", "w", "g")),
            _tile("grass"),
        ])
        with pytest.raises(TilesetError, match="not flagged"):
            load_tileset(doc)

    def test_desk_loads_from_file(self, desk):
        assert desk.n_tiles == 24
        assert set(Category) == {Category(c) for c in desk.categories}
        assert desk.water_center.sum() == 1

    def test_desk_adjacency_matches_label_matching_oracle(self, desk):
        assert np.array_equal(desk.allowed, oracle_adjacency(desk))

    def test_adjacency_symmetric_under_direction_reversal(self, desk, wilds):
        for ts in (desk, wilds):
            # b east of a <=> a west of b; same for north/south
            assert np.array_equal(ts.allowed[:, 1, :], ts.allowed[:, 3, :].T)
            assert np.array_equal(ts.allowed[:, 0, :], ts.allowed[:, 2, :].T)

    def test_no_dead_tiles_in_desk(self, desk):
        assert desk.allowed.any(axis=2).all()


class TestCountViolations:
    def test_uniform_grass_map_is_clean(self, desk):
        grass = desk.index("grass")
        for shape in ((1, 1), (3, 5), (8, 8)):
            grid = np.full(shape, grass, np.int32)
            assert count_violations(grid, desk) == 0

    def test_single_cell_has_no_edges(self, two_kinds):
        assert count_violations(np.array([[1]], np.int32), two_kinds) == 0

    def test_uncollapsed_cell_rejected(self, desk):
        grid = np.array([[0, -1]], np.int32)
        with pytest.raises(ValueError, match="uncollapsed"):
            count_violations(grid, desk)

    def test_random_maps_match_exhaustive_oracle(self, desk):
        rng = np.random.default_rng(42)
        for _ in range(20):
            grid = rng.integers(0, desk.n_tiles, (6, 6)).astype(np.int32)
            assert count_violations(grid, desk) == oracle_violations(grid, desk)

    def test_checkerboard_of_incompatible_tiles(self, two_kinds):
        grid = np.add.outer(np.arange(4), np.arange(4)) % 2
        grid = grid.astype(np.int32)
        # every one of the 24 edges joins an a with a b
        assert count_violations(grid, two_kinds) == 24

    def test_transpose_with_swapped_labels_invariant(self, desk):
        # transposing the map corresponds to swapping N<->W and E<->S labels
        swapped = make_tileset([
            (t.name, t.category, (t.edge_labels[3], t.edge_labels[2],
                                  t.edge_labels[1], t.edge_labels[0]))
            for t in desk.tiles
        ])
        rng = np.random.default_rng(7)
        for _ in range(10):
            grid = rng.integers(0, desk.n_tiles, (5, 7)).astype(np.int32)
            assert count_violations(grid, desk) == count_violations(grid.T, swapped)
