"""Hand-laid maps exercising the river and field score conditions.

Each catalog returns (name, grid, satisfies) triples: four maps meeting every
condition of the score and four violating exactly one condition each. River
maps are 20x20; field maps 10x10. Rivers are laid as cell paths between
border points so the curves are legal tile arrangements, not just category
paints.
"""

from __future__ import annotations

import numpy as np

N, E, S, W = 0, 1, 2, 3
_STEP = {N: (-1, 0), E: (0, 1), S: (1, 0), W: (0, -1)}
_RIVER_BY_SIDES = {
    frozenset((N, S)): "river_ns",
    frozenset((E, W)): "river_ew",
    frozenset((N, E)): "river_ne",
    frozenset((S, E)): "river_se",
    frozenset((S, W)): "river_sw",
    frozenset((N, W)): "river_nw",
}


def _expand(waypoints):
    """Turning points -> full cell sequence (inclusive, axis-aligned runs)."""
    cells = [waypoints[0]]
    for (r0, c0), (r1, c1) in zip(waypoints, waypoints[1:]):
        assert r0 == r1 or c0 == c1, "runs must be axis-aligned"
        dr = (r1 > r0) - (r1 < r0)
        dc = (c1 > c0) - (c1 < c0)
        r, c = r0, c0
        while (r, c) != (r1, c1):
            r, c = r + dr, c + dc
            cells.append((r, c))
    return cells


def _direction(src, dst):
    for d, (dr, dc) in _STEP.items():
        if (src[0] + dr, src[1] + dc) == dst:
            return d
    raise ValueError(f"{src} and {dst} are not adjacent")


def lay_river(ts, grid, waypoints):
    """Write a connected width-1 river along the waypoint polyline. Endpoints
    should sit on the map border; their loose edge dangles off-grid, which
    keeps the arrangement adjacency-clean."""
    cells = _expand(waypoints)
    for i, cell in enumerate(cells):
        sides = set()
        if i > 0:
            sides.add(_direction(cell, cells[i - 1]))
        if i + 1 < len(cells):
            sides.add(_direction(cell, cells[i + 1]))
        if len(sides) == 1:
            # endpoint: the channel stays straight, its loose edge facing
            # away from the river (off-grid when the endpoint is on a border)
            only = next(iter(sides))
            sides.add((only + 2) % 4)
        grid[cell] = ts.index(_RIVER_BY_SIDES[frozenset(sides)])
    return grid


def _grass_map(ts, shape):
    return np.full(shape, ts.index("grass"), np.int32)


def river_catalog(ts):
    """(name, 20x20 grid, satisfies_all) fixtures for the river score."""
    out = []

    # single S-curve, 50 cells, splits land in two
    s_curve = lay_river(ts, _grass_map(ts, (20, 20)),
                        [(2, 0), (2, 17), (17, 17), (17, 0)])
    out.append(("s_curve", s_curve, True))

    # same shape through different rows/cols
    s_curve2 = lay_river(ts, _grass_map(ts, (20, 20)),
                         [(5, 19), (5, 3), (15, 3), (15, 19)])
    out.append(("s_curve_mirrored", s_curve2, True))

    # exactly 36 cells: span sits exactly at the minimum length
    exact = lay_river(ts, _grass_map(ts, (20, 20)),
                      [(0, 4), (16, 4), (16, 8), (1, 8)])
    exact[0, 8] = ts.index("shore_s")  # cap the interior channel end
    out.append(("span_at_minimum", exact, True))

    # two full-width arms: traps one strip, land regions exactly 3
    two_arm = lay_river(ts, _grass_map(ts, (20, 20)),
                        [(2, 0), (2, 19), (4, 19), (4, 0)])
    out.append(("two_arm_regions_at_limit", two_arm, True))

    # split channel: everything fine except there are two water regions
    split = lay_river(ts, _grass_map(ts, (20, 20)),
                      [(2, 0), (2, 17), (17, 17), (17, 0)])
    split[10, 10] = ts.index("river_ns")
    out.append(("extra_disjoint_water", split, False))

    # one straight crossing: single short river, span 19 < minimum
    short = lay_river(ts, _grass_map(ts, (20, 20)), [(2, 0), (2, 19)])
    out.append(("too_short", short, False))

    # S-curve with one open-water cell spliced into the channel
    ponded = lay_river(ts, _grass_map(ts, (20, 20)),
                       [(2, 0), (2, 17), (17, 17), (17, 0)])
    ponded[2, 5] = ts.index("pond")
    ponded[3, 5] = ts.index("shore_n")  # cap the pond's loose south edge
    out.append(("open_water_cell", ponded, False))

    # three full-width arms: traps two strips plus the top band, 4 regions
    four_regions = lay_river(ts, _grass_map(ts, (20, 20)),
                             [(2, 0), (2, 19), (4, 19), (4, 0), (6, 0), (6, 19)])
    out.append(("too_many_land_regions", four_regions, False))

    return out


def field_catalog(ts):
    """(name, 10x10 grid, satisfies_all) fixtures for the field score."""
    grass, flowers = ts.index("grass"), ts.index("flowers")
    out = []

    half = _grass_map(ts, (10, 10))
    half[::2] = flowers
    out.append(("half_and_half", half, True))

    mostly_grass = _grass_map(ts, (10, 10))
    mostly_grass[:3] = flowers
    out.append(("thirty_percent_flowers", mostly_grass, True))

    boundary = _grass_map(ts, (10, 10))
    boundary[2:] = flowers  # grass exactly 20%
    out.append(("grass_at_minimum", boundary, True))

    with_path = _grass_map(ts, (10, 10))
    with_path[:4] = flowers
    with_path[9, :] = ts.index("path_ew")  # excluded from percentages
    out.append(("with_path_row", with_path, True))

    wet = _grass_map(ts, (10, 10))
    wet[:5] = flowers
    wet[7, 2] = ts.index("pond")
    wet[6, 2] = ts.index("shore_s")
    wet[8, 2] = ts.index("shore_n")
    out.append(("three_water_cells", wet, False))

    hilly = _grass_map(ts, (10, 10))
    hilly[:5] = flowers
    hilly[4, 4] = hilly[6, 6] = ts.index("hillock")
    out.append(("two_hills", hilly, False))

    sparse_grass = _grass_map(ts, (10, 10))
    sparse_grass[1:] = flowers  # grass only 10%
    out.append(("grass_short", sparse_grass, False))

    sparse_flowers = _grass_map(ts, (10, 10))
    sparse_flowers[0] = flowers  # flowers only 10%
    out.append(("flowers_short", sparse_flowers, False))

    return out
