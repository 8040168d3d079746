"""Seeded experiment sweeps and convergence statistics.

A sweep runs every (method, target, seed) cell of an ExperimentConfig and
appends one row per run to a results CSV. The file starts with a fingerprint
comment derived from the config, so an interrupted sweep can resume without
double-counting and never mixes configs. At finalization rows are rewritten
sorted by (method, target, seed), which makes the output independent of
worker scheduling.

Wall-clock timings are kept on the in-memory records and logged to stderr;
the wall_time_s CSV column is left empty so identical configs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .evolution import (
    METHODS,
    CrossoverMethod,
    EvoParams,
    Problem,
    RunRecord,
    default_params,
    run_method,
)
from .objectives import ObjectiveKind, ObjectiveSpec
from .tileset import TileSet, desk_tileset_path, load_tileset

RESULTS_COLUMNS = (
    "method", "objective", "target_P", "seed", "converged",
    "generation_of_convergence", "best_final_reward", "generations_run",
    "wall_time_s",
)
STATS_COLUMNS = (
    "method", "objective", "target_P", "n_runs", "n_converged",
    "converged_fraction", "mean_generations", "se_generations",
)

THREADS_ENV_VAR = "WFCMDP_THREADS"


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configs."""


@dataclass(frozen=True)
class ExperimentConfig:
    dims: tuple[int, int]
    methods: tuple[str, ...]
    objective: ObjectiveKind
    targets: tuple[int, ...]
    runs_per_cell: int
    base_seed: int
    params: dict[str, EvoParams]
    out: str
    tileset: str | None = None  # None = bundled desk tileset


@dataclass(frozen=True)
class CellStats:
    method: str
    objective: str
    target: int
    n_runs: int
    n_converged: int
    converged_fraction: float
    mean_generations: float | None
    se_generations: float | None


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}")
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# config loading
# ---------------------------------------------------------------------------

def _params_from_dict(kind: ObjectiveKind, method: str, raw: dict) -> EvoParams:
    params = default_params(kind, method)
    fields = dict(raw)
    if "cross_over_method" in fields:
        value = fields["cross_over_method"]
        fields["cross_over_method"] = (
            CrossoverMethod[value.upper()] if isinstance(value, str)
            else CrossoverMethod(int(value))
        )
    try:
        return replace(params, **fields)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad params for {method!r}: {exc}")


def config_from_dict(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("experiment config must be a JSON object")
    try:
        kind = ObjectiveKind(doc.get("objective", "binary"))
    except ValueError:
        raise ConfigError(f"unknown objective {doc.get('objective')!r}")

    methods = tuple(doc.get("methods", METHODS))
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; expected one of {METHODS}")
    if not methods:
        raise ConfigError("config lists no methods")

    dims_raw = doc.get("dims", [20, 20])
    if not (isinstance(dims_raw, (list, tuple)) and len(dims_raw) == 2):
        raise ConfigError("dims must be [rows, cols]")
    dims = (int(dims_raw[0]), int(dims_raw[1]))
    if dims[0] < 1 or dims[1] < 1:
        raise ConfigError("dims must be positive")

    if kind.needs_target:
        targets = tuple(int(t) for t in doc.get("targets", ()))
        if not targets:
            raise ConfigError(f"objective {kind.value!r} needs non-empty targets")
        if any(t < 0 for t in targets):
            raise ConfigError("targets must be non-negative")
    else:
        targets = (0,)

    runs = int(doc.get("runs_per_cell", 20))
    if runs < 1:
        raise ConfigError("runs_per_cell must be >= 1")

    raw_params = doc.get("params", {})
    params = {
        m: _params_from_dict(kind, m, raw_params.get(m, {})) for m in methods
    }

    return ExperimentConfig(
        dims=dims,
        methods=methods,
        objective=kind,
        targets=targets,
        runs_per_cell=runs,
        base_seed=int(doc.get("base_seed", 0)),
        params=params,
        out=str(doc.get("out", "results.csv")),
        tileset=doc.get("tileset"),
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        text = open(path).read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    return config_from_dict(doc)


def config_fingerprint(cfg: ExperimentConfig) -> str:
    payload = {
        "dims": list(cfg.dims),
        "methods": list(cfg.methods),
        "objective": cfg.objective.value,
        "targets": list(cfg.targets),
        "runs_per_cell": cfg.runs_per_cell,
        "base_seed": cfg.base_seed,
        "tileset": cfg.tileset,
        "params": {
            m: {
                "generations": p.generations,
                "population": p.population,
                "survival_rate": p.survival_rate,
                "number_of_actions_mutated_mean": p.number_of_actions_mutated_mean,
                "number_of_actions_mutated_standard_deviation":
                    p.number_of_actions_mutated_standard_deviation,
                "action_noise_standard_deviation": p.action_noise_standard_deviation,
                "cross_over_method": int(p.cross_over_method),
                "cross_or_mutate": p.cross_or_mutate,
                "early_stop": p.early_stop,
            }
            for m, p in sorted(cfg.params.items())
        },
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# results CSV
# ---------------------------------------------------------------------------

def _fmt_float(value: float) -> str:
    return repr(float(value))


def record_to_row(rec: RunRecord) -> list[str]:
    return [
        rec.method,
        rec.objective.value,
        str(rec.target),
        str(rec.seed),
        "1" if rec.converged else "0",
        "" if rec.generation_of_convergence is None
        else str(rec.generation_of_convergence),
        _fmt_float(rec.best_fitness),
        str(rec.generations_run),
        "",  # wall_time_s: kept empty for byte-identical re-runs
    ]


def _row_to_record(row: list[str]) -> RunRecord:
    return RunRecord(
        method=row[0],
        objective=ObjectiveKind(row[1]),
        target=int(row[2]),
        seed=int(row[3]),
        converged=row[4] == "1",
        generation_of_convergence=int(row[5]) if row[5] else None,
        best_reward_per_generation=[],
        generations_run=int(row[7]),
        wall_time=0.0,
        best_fitness=float(row[6]),
    )


def read_results_csv(path: str, expected_fingerprint: str | None = None):
    """Rows of an existing results file as lightweight RunRecords (traces
    and timings are not persisted)."""
    with open(path, newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("# config="):
            raise ConfigError(f"{path} is not a results file (missing fingerprint)")
        fingerprint = first.removeprefix("# config=")
        if expected_fingerprint is not None and fingerprint != expected_fingerprint:
            raise ConfigError(
                f"{path} was produced by a different config "
                f"(fingerprint {fingerprint} != {expected_fingerprint})"
            )
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != RESULTS_COLUMNS:
            raise ConfigError(f"{path} has unexpected columns: {header}")
        rows = [row for row in reader if row]
    records = []
    for i, row in enumerate(rows):
        try:
            records.append(_row_to_record(row))
        except (IndexError, ValueError) as exc:
            # a killed sweep can truncate the final append; drop that row so
            # the cell simply reruns, but refuse corruption anywhere else
            if i == len(rows) - 1:
                break
            raise ConfigError(f"{path} row {i + 2} is corrupt: {exc}")
    return records


def write_results_csv(path: str, fingerprint: str, records: list[RunRecord]) -> None:
    ordered = sorted(records, key=lambda r: (r.method, r.target, r.seed))
    with open(path, "w", newline="") as fh:
        fh.write(f"# config={fingerprint}\n")
        writer = csv.writer(fh)
        writer.writerow(RESULTS_COLUMNS)
        writer.writerows(record_to_row(r) for r in ordered)


# ---------------------------------------------------------------------------
# sweep execution
# ---------------------------------------------------------------------------

def _load_config_tileset(cfg: ExperimentConfig) -> TileSet:
    return load_tileset(cfg.tileset if cfg.tileset else desk_tileset_path())


def _run_cell(ts: TileSet, dims, kind: ObjectiveKind, target: int,
              method: str, params: EvoParams) -> RunRecord:
    problem = Problem(ts, dims, ObjectiveSpec(kind, target))
    return run_method(method, params, problem)


def _warm_kernels(ts: TileSet) -> None:
    # trigger jit compilation in the parent before workers fork
    from .env import Layout, rollout
    from . import kernels

    actions = np.zeros((1, ts.n_tiles))
    rollout(ts, (1, 1), ObjectiveSpec(ObjectiveKind.BINARY, 0), actions, Layout.SEQ1D)
    mask = np.zeros((1, 1), bool)
    kernels.ACTIVE.grid_diameter(mask)
    kernels.ACTIVE.count_components(mask)


def run_experiment(cfg: ExperimentConfig, log=None) -> list[RunRecord]:
    """Execute every (method, target, seed) run of the sweep, appending rows
    incrementally and resuming past partial results. Returns one RunRecord
    per cell of the experiment, previously-finished cells included."""
    log = log if log is not None else sys.stderr
    ts = _load_config_tileset(cfg)
    fingerprint = config_fingerprint(cfg)

    done: list[RunRecord] = []
    if os.path.exists(cfg.out):
        done = read_results_csv(cfg.out, expected_fingerprint=fingerprint)
    done_keys = {(r.method, r.target, r.seed) for r in done}

    jobs = []
    for method in cfg.methods:
        for target in cfg.targets:
            for i in range(cfg.runs_per_cell):
                seed = cfg.base_seed + i
                if (method, target, seed) not in done_keys:
                    params = replace(cfg.params[method], seed=seed)
                    jobs.append((method, target, params))

    if not os.path.exists(cfg.out):
        with open(cfg.out, "w", newline="") as fh:
            fh.write(f"# config={fingerprint}\n")
            csv.writer(fh).writerow(RESULTS_COLUMNS)

    fresh: list[RunRecord] = []

    def _consume(rec: RunRecord) -> None:
        fresh.append(rec)
        with open(cfg.out, "a", newline="") as fh:
            csv.writer(fh).writerow(record_to_row(rec))
        print(
            f"[{len(done) + len(fresh)}/{len(done) + len(jobs)}] "
            f"{rec.method} P={rec.target} seed={rec.seed} "
            f"converged={int(rec.converged)} gens={rec.generations_run} "
            f"({rec.wall_time:.1f}s)",
            file=log,
        )

    workers = worker_count()
    if jobs:
        _warm_kernels(ts)
    if workers <= 1 or len(jobs) <= 1:
        for method, target, params in jobs:
            _consume(_run_cell(ts, cfg.dims, cfg.objective, target, method, params))
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            futures = [
                pool.submit(_run_cell, ts, cfg.dims, cfg.objective, target,
                            method, params)
                for method, target, params in jobs
            ]
            for future in futures:
                _consume(future.result())

    everything = done + fresh
    write_results_csv(cfg.out, fingerprint, everything)
    return sorted(everything, key=lambda r: (r.method, r.target, r.seed))


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

def convergence_stats(records: list[RunRecord]) -> list[CellStats]:
    """Per (method, objective, target) cell: converged fraction plus mean and
    standard error of the convergence generation over converged runs. The SE
    is the sample standard deviation over sqrt(n); absent for fewer than two
    converged runs, as is the mean for zero."""
    groups: dict[tuple, list[RunRecord]] = {}
    for rec in records:
        key = (rec.method, rec.objective.value, rec.target)
        groups.setdefault(key, []).append(rec)

    out = []
    for (method, objective, target), recs in sorted(groups.items()):
        gens = [r.generation_of_convergence for r in recs if r.converged]
        n_conv = len(gens)
        mean = se = None
        if n_conv >= 1:
            mean = sum(gens) / n_conv
        if n_conv >= 2:
            sd = math.sqrt(sum((g - mean) ** 2 for g in gens) / (n_conv - 1))
            se = sd / math.sqrt(n_conv)
        out.append(CellStats(
            method=method,
            objective=objective,
            target=target,
            n_runs=len(recs),
            n_converged=n_conv,
            converged_fraction=n_conv / len(recs),
            mean_generations=mean,
            se_generations=se,
        ))
    return out


def write_stats_csv(path: str, stats: list[CellStats]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(STATS_COLUMNS)
        for s in stats:
            writer.writerow([
                s.method,
                s.objective,
                str(s.target),
                str(s.n_runs),
                str(s.n_converged),
                _fmt_float(s.converged_fraction),
                "" if s.mean_generations is None else _fmt_float(s.mean_generations),
                "" if s.se_generations is None else _fmt_float(s.se_generations),
            ])


def format_stats_table(stats: list[CellStats]) -> str:
    """Human-readable summary: one line per cell, em-dash for cells with no
    converged runs and a bare mean when only one run converged."""
    lines = [f"{'method':<10} {'objective':<22} {'P':>4} {'conv%':>6} {'generations':>14}"]
    for s in stats:
        if s.mean_generations is None:
            gens = "—"
        elif s.se_generations is None:
            gens = f"{s.mean_generations:.1f}".rstrip("0").rstrip(".")
        else:
            gens = f"{s.mean_generations:.1f}±{s.se_generations:.1f}"
        lines.append(
            f"{s.method:<10} {s.objective:<22} {s.target:>4} "
            f"{s.converged_fraction:>6.2f} {gens:>14}"
        )
    return "\n".join(lines)
