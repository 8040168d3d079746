import numpy as np
import pytest

from wfcmdp.tileset import TileSet, Tile, Category, load_desk_tileset


@pytest.fixture(scope="session")
def desk():
    return load_desk_tileset()


def make_tileset(entries) -> TileSet:
    """Hand-built tileset from (name, category, edges[, water_center]) rows.

    Bypasses load-time validation on purpose so tests can build adversarial
    sets (dead tiles, contradiction-prone sets).
    """
    tiles = []
    for i, entry in enumerate(entries):
        name, category, edges = entry[:3]
        water_center = bool(entry[3]) if len(entry) > 3 else False
        tiles.append(Tile(
            id=i,
            name=name,
            category=category,
            edge_labels=tuple(edges),
            is_water_center=water_center,
            color=(0, 0, 0),
        ))
    return TileSet(tiles)


@pytest.fixture(scope="session")
def two_kinds():
    """Two tiles that only neighbor themselves: any mixed edge violates."""
    return make_tileset([
        ("a", Category.GRASS, "aaaa"),
        ("b", Category.GRASS, "bbbb"),
    ])


@pytest.fixture(scope="session")
def chain3():
    """Directed horizontal chain: b may sit east of a, c east of b, nothing
    else; vertically everything matches everything."""
    return make_tileset([
        ("a", Category.GRASS, ("v", "x", "v", "q")),
        ("b", Category.GRASS, ("v", "y", "v", "x")),
        ("c", Category.GRASS, ("v", "z", "v", "y")),
    ])


@pytest.fixture(scope="session")
def trail():
    """Grass plus path pieces with no end caps: trails must loop or exit at
    the border, so scripted collapse orders can pinch a cell empty."""
    C = Category
    return make_tileset([
        ("grass", C.GRASS, "gggg"),
        ("trail_ns", C.PATH, "pgpg"),
        ("trail_ew", C.PATH, "gpgp"),
        ("trail_ne", C.PATH, "ppgg"),
        ("trail_se", C.PATH, "gppg"),
        ("trail_sw", C.PATH, "ggpp"),
        ("trail_nw", C.PATH, "pggp"),
    ])


@pytest.fixture(scope="session")
def wilds():
    """Paths and rivers without end caps. Min-entropy rollouts on this set
    genuinely hit contradictions (path and water forcing fronts can meet at
    a cell no tile satisfies); seed 144 on 6x6 is a frozen example."""
    C = Category
    return make_tileset([
        ("grass", C.GRASS, "gggg"),
        ("flowers", C.FLOWER, "gggg"),
        ("hillock", C.HILL, "gggg"),
        ("path_ns", C.PATH, "pgpg"),
        ("path_ew", C.PATH, "gpgp"),
        ("path_ne", C.PATH, "ppgg"),
        ("path_se", C.PATH, "gppg"),
        ("path_sw", C.PATH, "ggpp"),
        ("path_nw", C.PATH, "pggp"),
        ("river_ns", C.WATER, "wgwg"),
        ("river_ew", C.WATER, "gwgw"),
        ("river_ne", C.WATER, "wwgg"),
        ("river_se", C.WATER, "gwwg"),
        ("river_sw", C.WATER, "ggww"),
        ("river_nw", C.WATER, "wggw"),
        ("pond", C.WATER, "wwww", True),
        ("shore_n", C.SHORE, "wggg"),
        ("shore_e", C.SHORE, "gwgg"),
        ("shore_s", C.SHORE, "ggwg"),
        ("shore_w", C.SHORE, "gggw"),
    ])


# -- independent oracles -----------------------------------------------------

def oracle_adjacency(ts: TileSet) -> np.ndarray:
    """Label-matching adjacency recomputed pair by pair."""
    opposite = {0: 2, 1: 3, 2: 0, 3: 1}
    n = ts.n_tiles
    out = np.zeros((n, 4, n), bool)
    for a in ts.tiles:
        for d in range(4):
            for b in ts.tiles:
                out[a.id, d, b.id] = (
                    a.edge_labels[d] == b.edge_labels[opposite[d]]
                )
    return out


def oracle_violations(grid: np.ndarray, ts: TileSet) -> int:
    """Exhaustive enumeration of every horizontal and vertical cell pair."""
    rows, cols = grid.shape
    bad = 0
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols and not ts.allowed[grid[r, c], 1, grid[r, c + 1]]:
                bad += 1
            if r + 1 < rows and not ts.allowed[grid[r, c], 2, grid[r + 1, c]]:
                bad += 1
    return bad


def oracle_diameter_floyd_warshall(mask: np.ndarray) -> int:
    """All-pairs shortest paths via Floyd-Warshall over the masked cells."""
    coords = [tuple(rc) for rc in np.argwhere(mask)]
    n = len(coords)
    if n <= 1:
        return 0
    index = {rc: i for i, rc in enumerate(coords)}
    inf = float("inf")
    dist = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for (r, c), i in index.items():
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            j = index.get((nr, nc))
            if j is not None:
                dist[i][j] = 1
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik == inf:
                continue
            di = dist[i]
            for j in range(n):
                alt = dik + dk[j]
                if alt < di[j]:
                    di[j] = alt
    best = 0
    for i in range(n):
        for j in range(n):
            if dist[i][j] != inf and dist[i][j] > best:
                best = dist[i][j]
    return int(best)


def oracle_components_flood_fill(mask: np.ndarray) -> int:
    """Connected-component count by explicit-stack flood fill."""
    rows, cols = mask.shape
    seen = set()
    count = 0
    for r in range(rows):
        for c in range(cols):
            if not mask[r, c] or (r, c) in seen:
                continue
            count += 1
            stack = [(r, c)]
            seen.add((r, c))
            while stack:
                cr, cc = stack.pop()
                for nr, nc in ((cr - 1, cc), (cr + 1, cc), (cr, cc - 1), (cr, cc + 1)):
                    if (
                        0 <= nr < rows and 0 <= nc < cols
                        and mask[nr, nc] and (nr, nc) not in seen
                    ):
                        seen.add((nr, nc))
                        stack.append((nr, nc))
    return count


def oracle_arc_consistent(ts: TileSet, cands: np.ndarray) -> bool:
    """Direct scan of the arc-consistency condition: every candidate of every
    cell has a compatible candidate in every in-bounds neighbor."""
    rows, cols, n = cands.shape
    offsets = {0: (-1, 0), 1: (0, 1), 2: (1, 0), 3: (0, -1)}
    for r in range(rows):
        for c in range(cols):
            for t in range(n):
                if not cands[r, c, t]:
                    continue
                for d, (dr, dc) in offsets.items():
                    nr, nc = r + dr, c + dc
                    if not (0 <= nr < rows and 0 <= nc < cols):
                        continue
                    if not any(
                        cands[nr, nc, u] and ts.allowed[t, d, u]
                        for u in range(n)
                    ):
                        return False
    return True


def name_grid(ts: TileSet, rows) -> np.ndarray:
    """Build a map from tile names, one whitespace-separated string per row."""
    data = [[ts.index(name) for name in row.split()] for row in rows]
    return np.array(data, np.int32)
