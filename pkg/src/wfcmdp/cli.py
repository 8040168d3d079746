"""Command-line driver: generate, evolve, sweep, stats, render.

Exit codes: 0 success, 1 config/usage problem, 2 generation hit a
contradiction, 3 I/O failure. Diagnostics go to stderr; stdout carries data
only where a command is explicitly about printing it.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import harness
from .env import Layout, rollout
from .evolution import METHODS
from .harness import ConfigError, ExperimentConfig
from .objectives import ObjectiveKind, ObjectiveSpec
from .render import MapFormatError, format_map, read_map, render_ppm, render_text, write_map
from .tileset import TilesetError, desk_tileset_path, load_tileset

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CONTRADICTION = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _parse_dims(text: str) -> tuple[int, int]:
    parts = text.lower().replace("x", " ").split()
    try:
        if len(parts) == 1:
            rows = cols = int(parts[0])
        elif len(parts) == 2:
            rows, cols = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise ConfigError(f"bad dims {text!r}; expected ROWSxCOLS")
    if rows < 1 or cols < 1:
        raise ConfigError("dims must be positive")
    return rows, cols


def _load_tileset_arg(path: str | None):
    return load_tileset(path if path else desk_tileset_path())


def _stats_path(results_path: str) -> str:
    root, _ = os.path.splitext(results_path)
    return root + ".stats.csv"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_generate(args) -> int:
    ts = _load_tileset_arg(args.tileset)
    rows, cols = _parse_dims(args.dims)
    rng = np.random.default_rng(args.seed)
    actions = rng.random((rows * cols, ts.n_tiles))
    result = rollout(ts, (rows, cols), ObjectiveSpec(ObjectiveKind.BINARY, 0),
                     actions, Layout.SEQ1D)
    if not result.completed:
        cell = result.contradiction.cell
        print(
            f"contradiction at cell ({cell[0]}, {cell[1]}) "
            f"after {result.steps} steps",
            file=sys.stderr,
        )
        return EXIT_CONTRADICTION
    if args.out:
        write_map(args.out, result.grid)
    else:
        sys.stdout.write(format_map(result.grid))
    return EXIT_OK


def cmd_evolve(args) -> int:
    if args.config:
        cfg = harness.load_config(args.config)
    else:
        cfg = harness.config_from_dict({
            "objective": args.objective or "binary",
            "targets": [args.target if args.target is not None else 10],
            "methods": [args.method or "evo1d"],
        })
    method = args.method or cfg.methods[0]
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; expected one of {METHODS}")
    kind = ObjectiveKind(args.objective) if args.objective else cfg.objective
    if kind.needs_target:
        target = args.target if args.target is not None else cfg.targets[0]
    else:
        target = 0

    params = dict(cfg.params)
    base = params.get(method) or harness.default_params(kind, method)
    overrides = {}
    if args.generations is not None:
        overrides["generations"] = args.generations
    if args.population is not None:
        overrides["population"] = args.population
    if overrides:
        base = replace(base, **overrides)

    cell = ExperimentConfig(
        dims=_parse_dims(args.dims) if args.dims else cfg.dims,
        methods=(method,),
        objective=kind,
        targets=(target,),
        runs_per_cell=1,
        base_seed=args.seed,
        params={method: base},
        out=args.out or "evolve_results.csv",
        tileset=args.tileset or cfg.tileset,
    )
    records = harness.run_experiment(cell)
    rec = records[0]
    if rec.best_map is not None:
        map_path = args.map_out or os.path.splitext(cell.out)[0] + ".best.map"
        write_map(map_path, rec.best_map)
        print(f"best map written to {map_path}", file=sys.stderr)
    print(
        f"{rec.method} {kind.value} P={target} seed={args.seed}: "
        f"converged={int(rec.converged)} best={rec.best_fitness} "
        f"generations={rec.generations_run}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = harness.load_config(args.config)
    records = harness.run_experiment(cfg)
    stats = harness.convergence_stats(records)
    harness.write_stats_csv(_stats_path(cfg.out), stats)
    print(harness.format_stats_table(stats), file=sys.stderr)
    print(f"results: {cfg.out}", file=sys.stderr)
    print(f"stats:   {_stats_path(cfg.out)}", file=sys.stderr)
    return EXIT_OK


def cmd_stats(args) -> int:
    records = harness.read_results_csv(args.results)
    stats = harness.convergence_stats(records)
    out = args.out or _stats_path(args.results)
    harness.write_stats_csv(out, stats)
    print(harness.format_stats_table(stats))
    return EXIT_OK


def cmd_render(args) -> int:
    if args.cell_size < 1:
        raise ConfigError("--cell-size must be >= 1")
    grid = read_map(args.input)
    if args.format == "text":
        payload = render_text(grid).encode()
    else:
        ts = _load_tileset_arg(args.tileset)
        payload = render_ppm(grid, ts, args.cell_size)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tileset", help="tileset JSON path (default: bundled desk set)")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--out", help="output path")

    parser = _Parser(prog="wfcmdp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common],
                       help="one seeded random constraint-respecting map")
    p.add_argument("--dims", default="20x20", help="map size ROWSxCOLS")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evolve", parents=[common],
                       help="run one (method, objective, target) evolution")
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--objective", choices=[k.value for k in ObjectiveKind])
    p.add_argument("--target", type=int, help="target path length")
    p.add_argument("--dims", help="map size ROWSxCOLS")
    p.add_argument("--generations", type=int)
    p.add_argument("--population", type=int)
    p.add_argument("--map-out", help="path for the best decoded map")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sweep", parents=[common],
                       help="run a full experiment config")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", parents=[common],
                       help="aggregate a results CSV into convergence stats")
    p.add_argument("--results", required=True, help="results CSV path")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("render", parents=[common],
                       help="render a map file as text or a P6 PPM image")
    p.add_argument("--input", required=True, help="map file path")
    p.add_argument("--format", choices=["text", "ppm"], default="ppm")
    p.add_argument("--cell-size", type=int, default=8,
                   help="pixels per cell for ppm output")
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, TilesetError, MapFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
