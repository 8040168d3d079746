"""Genome representations, variation operators, and the three optimizers:
penalty-based direct-map evolution, feasible/infeasible two-population
evolution, and elitist evolution over collapse-action sequences.

All three share one genome shape: a (rows*cols, n_tiles) table of values in
[0, 1]. Direct-map genomes decode each row independently by argmax; action
sequence genomes feed the rows to the episode rollout in 1D (by timestep) or
2D (by collapsed cell) order.

Determinism contract: a run is a pure function of (params, problem). All
randomness flows from numpy Generators seeded via SeedSequence(seed,
spawn_key=(generation,)), with generation 0 reserved for population init, so
results do not depend on scheduling or worker count.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np

from .env import Layout, rollout
from .objectives import ObjectiveKind, ObjectiveSpec
from .tileset import TileSet, count_violations

METHODS = ("baseline", "fi2pop", "evo1d", "evo2d")

METHOD_LAYOUTS = {
    "baseline": Layout.DIRECT_MAP,
    "fi2pop": Layout.DIRECT_MAP,
    "evo1d": Layout.SEQ1D,
    "evo2d": Layout.GRID2D,
}


class CrossoverMethod(IntEnum):
    UNIFORM = 0
    ONE_POINT = 1


@dataclass(frozen=True)
class EvoParams:
    generations: int = 600
    population: int = 48
    survival_rate: float = 0.5
    number_of_actions_mutated_mean: int = 48
    number_of_actions_mutated_standard_deviation: float = 24.0
    action_noise_standard_deviation: float = 0.1
    cross_over_method: CrossoverMethod = CrossoverMethod.ONE_POINT
    cross_or_mutate: float = 0.8
    seed: int = 0
    early_stop: bool = True

    def __post_init__(self):
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if not 0.0 < self.survival_rate <= 1.0:
            raise ValueError("survival_rate must be in (0, 1]")
        if self.number_of_actions_mutated_mean < 0:
            raise ValueError("mutation count mean must be >= 0")
        if self.number_of_actions_mutated_standard_deviation < 0:
            raise ValueError("mutation count std must be >= 0")
        if self.action_noise_standard_deviation < 0:
            raise ValueError("action noise std must be >= 0")
        if not 0.0 <= self.cross_or_mutate <= 1.0:
            raise ValueError("cross_or_mutate must be in [0, 1]")


@dataclass(frozen=True)
class Genome:
    layout: Layout
    values: np.ndarray  # (rows*cols, n_tiles) float64 in [0, 1]


@dataclass(frozen=True)
class Evaluation:
    objective: float
    violations: int
    fitness: float


@dataclass(frozen=True)
class Problem:
    ts: TileSet
    dims: tuple[int, int]
    objective: ObjectiveSpec


@dataclass
class RunRecord:
    method: str
    objective: ObjectiveKind
    target: int
    seed: int
    converged: bool
    generation_of_convergence: int | None
    best_reward_per_generation: list[float]
    generations_run: int
    wall_time: float
    best_fitness: float
    best_map: np.ndarray | None = field(default=None, repr=False)


def make_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


# ---------------------------------------------------------------------------
# genome construction and variation
# ---------------------------------------------------------------------------

def init_population(
    n: int, layout: Layout, dims: tuple[int, int], n_tiles: int,
    rng: np.random.Generator,
) -> list[Genome]:
    """n genomes with i.i.d. uniform [0, 1) values."""
    loci = dims[0] * dims[1]
    return [Genome(layout, rng.random((loci, n_tiles))) for _ in range(n)]


def mutate(genome: Genome, params: EvoParams, rng: np.random.Generator) -> Genome:
    """Perturb a sampled number of loci with Gaussian noise.

    Draw order (relied on by tests replaying the stream): the truncated
    count, then the locus choice, then the noise block. The count is a
    normal(mean, std) sample rounded to the nearest integer and clamped into
    [0, loci]; each chosen locus gets i.i.d. noise on its whole action
    vector, then values are clamped back into [0, 1].
    """
    loci = genome.values.shape[0]
    raw = rng.normal(
        params.number_of_actions_mutated_mean,
        params.number_of_actions_mutated_standard_deviation,
    )
    k = int(min(max(round(raw), 0), loci))
    values = genome.values.copy()
    chosen = rng.choice(loci, size=k, replace=False)
    noise = rng.normal(0.0, params.action_noise_standard_deviation,
                       (k, values.shape[1]))
    values[chosen] = np.clip(values[chosen] + noise, 0.0, 1.0)
    return Genome(genome.layout, values)


def crossover(
    a: Genome, b: Genome, method: CrossoverMethod, rng: np.random.Generator
) -> Genome:
    """Child whose every locus equals the corresponding locus of one parent:
    a fair per-locus coin for UNIFORM, a prefix/suffix splice for ONE_POINT."""
    if a.values.shape != b.values.shape or a.layout is not b.layout:
        raise ValueError("crossover needs genomes of identical shape and layout")
    loci = a.values.shape[0]
    if method == CrossoverMethod.UNIFORM:
        from_a = rng.random(loci) < 0.5
        values = np.where(from_a[:, None], a.values, b.values)
    else:
        if loci < 2:
            values = a.values.copy()
        else:
            cut = int(rng.integers(1, loci))
            values = np.concatenate([a.values[:cut], b.values[cut:]])
    return Genome(a.layout, values)


def reproduce(
    parents: list[Genome], count: int, params: EvoParams,
    rng: np.random.Generator,
) -> list[Genome]:
    """`count` offspring, each via crossover of two uniformly drawn parents
    with probability cross_or_mutate, otherwise by mutating one."""
    if not parents:
        raise ValueError("reproduce needs at least one parent")
    out = []
    for _ in range(count):
        if rng.random() < params.cross_or_mutate:
            i = int(rng.integers(len(parents)))
            j = int(rng.integers(len(parents)))
            out.append(crossover(parents[i], parents[j],
                                 params.cross_over_method, rng))
        else:
            i = int(rng.integers(len(parents)))
            out.append(mutate(parents[i], params, rng))
    return out


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def decode_direct(genome: Genome, dims: tuple[int, int]) -> np.ndarray:
    """Per-locus argmax (smallest tile id on ties), ignoring adjacency."""
    return genome.values.argmax(axis=1).astype(np.int32).reshape(dims)


def evaluate_direct(genome: Genome, problem: Problem) -> Evaluation:
    grid = decode_direct(genome, problem.dims)
    objective = problem.objective.score(grid, problem.ts)
    violations = count_violations(grid, problem.ts)
    return Evaluation(objective, violations, objective - violations)


def evaluate_action_sequence(genome: Genome, problem: Problem) -> Evaluation:
    result = rollout(problem.ts, problem.dims, problem.objective,
                     genome.values, genome.layout)
    return Evaluation(result.reward, 0, result.reward)


def _evaluator_for(layout: Layout):
    if layout is Layout.DIRECT_MAP:
        return evaluate_direct
    return evaluate_action_sequence


def _decode_map(genome: Genome, problem: Problem) -> np.ndarray | None:
    if genome.layout is Layout.DIRECT_MAP:
        return decode_direct(genome, problem.dims)
    result = rollout(problem.ts, problem.dims, problem.objective,
                     genome.values, genome.layout)
    return result.grid


# ---------------------------------------------------------------------------
# optimizers
# ---------------------------------------------------------------------------

def _record(
    method: str, params: EvoParams, problem: Problem, trace: list[float],
    converged_at: int | None, generations_run: int, started: float,
    best_genome: Genome | None, best_fitness: float,
) -> RunRecord:
    best_map = None
    if best_genome is not None:
        best_map = _decode_map(best_genome, problem)
    return RunRecord(
        method=method,
        objective=problem.objective.kind,
        target=problem.objective.target_path_length,
        seed=params.seed,
        converged=converged_at is not None,
        generation_of_convergence=converged_at,
        best_reward_per_generation=trace,
        generations_run=generations_run,
        wall_time=time.perf_counter() - started,
        best_fitness=best_fitness,
        best_map=best_map,
    )


def _top_indices(keys: list, count: int) -> list[int]:
    """Indices of the `count` smallest keys, stable in the original order."""
    return sorted(range(len(keys)), key=lambda i: (keys[i], i))[:count]


def _evolve_elitist(
    method: str, params: EvoParams, problem: Problem, observer=None
) -> RunRecord:
    """Shared loop for the penalty baseline and both action-sequence
    layouts: keep the top ceil(survival_rate * N) by fitness, refill with
    offspring, track the best reward per generation.

    `observer`, when given, is called once per generation with a dict
    carrying the generation number and the full evaluation list; it exists
    for invariant checks and diagnostics and must not mutate its arguments.
    """
    started = time.perf_counter()
    layout = METHOD_LAYOUTS[method]
    evaluator = _evaluator_for(layout)
    n = params.population
    elite_count = math.ceil(params.survival_rate * n)

    population = init_population(
        n, layout, problem.dims, problem.ts.n_tiles, make_rng(params.seed, 0)
    )
    evals: list[Evaluation | None] = [None] * n

    trace: list[float] = []
    converged_at = None
    generations_run = 0
    best_fitness = -math.inf
    best_genome = None

    for gen in range(1, params.generations + 1):
        generations_run = gen
        for i in range(n):
            if evals[i] is None:
                evals[i] = evaluator(population[i], problem)
        if observer is not None:
            observer({"method": method, "generation": gen, "evals": list(evals)})
        gen_best = max(range(n), key=lambda i: (evals[i].fitness, -i))
        if evals[gen_best].fitness > best_fitness:
            best_fitness = evals[gen_best].fitness
            best_genome = population[gen_best]
        trace.append(evals[gen_best].fitness)

        if converged_at is None and evals[gen_best].fitness == 0.0:
            converged_at = gen
            if params.early_stop:
                break

        elite_idx = _top_indices([-e.fitness for e in evals], elite_count)
        rng = make_rng(params.seed, gen)
        offspring = reproduce(
            [population[i] for i in elite_idx], n - elite_count, params, rng
        )
        population = [population[i] for i in elite_idx] + offspring
        evals = [evals[i] for i in elite_idx] + [None] * len(offspring)

    return _record(method, params, problem, trace, converged_at,
                   generations_run, started, best_genome, best_fitness)


def evolve_baseline(params: EvoParams, problem: Problem, observer=None) -> RunRecord:
    """Direct-map evolution with fitness = objective - adjacency violations."""
    return _evolve_elitist("baseline", params, problem, observer)


def evolve_action_sequence(
    params: EvoParams, problem: Problem, layout: Layout, observer=None
) -> RunRecord:
    """Elitist evolution over collapse-action sequences; fitness is the
    terminal rollout reward."""
    layout = Layout(layout)
    if layout is Layout.SEQ1D:
        return _evolve_elitist("evo1d", params, problem, observer)
    if layout is Layout.GRID2D:
        return _evolve_elitist("evo2d", params, problem, observer)
    raise ValueError("action-sequence evolution needs seq1d or grid2d")


def evolve_fi2pop(params: EvoParams, problem: Problem, observer=None) -> RunRecord:
    """Two-population evolution: the feasible side (no violations) selects on
    the objective, the infeasible side selects on fewest violations; each
    side refills to half the population. Convergence is judged on the
    feasible side's best objective reaching 0.
    """
    if params.population % 2 != 0:
        raise ValueError("fi2pop needs an even population size")
    started = time.perf_counter()
    n = params.population
    half = n // 2

    population = init_population(
        n, Layout.DIRECT_MAP, problem.dims, problem.ts.n_tiles,
        make_rng(params.seed, 0),
    )
    evals: list[Evaluation | None] = [None] * n

    trace: list[float] = []
    converged_at = None
    generations_run = 0
    best_key = (math.inf, math.inf)
    best_genome = None
    best_fitness = -math.inf

    for gen in range(1, params.generations + 1):
        generations_run = gen
        for i in range(n):
            if evals[i] is None:
                evals[i] = evaluate_direct(population[i], problem)

        feasible = [i for i in range(n) if evals[i].violations == 0]
        infeasible = [i for i in range(n) if evals[i].violations > 0]
        if observer is not None:
            observer({
                "method": "fi2pop", "generation": gen, "evals": list(evals),
                "feasible": list(feasible), "infeasible": list(infeasible),
            })

        for i in range(n):
            # feasible genomes rank by objective, infeasible by violations
            key = ((0, -evals[i].objective) if evals[i].violations == 0
                   else (1, float(evals[i].violations)))
            if key < best_key:
                best_key = key
                best_genome = population[i]

        gen_best = (max(evals[i].objective for i in feasible)
                    if feasible else -math.inf)
        trace.append(gen_best)
        best_fitness = max(best_fitness, gen_best)

        if converged_at is None and gen_best == 0.0:
            converged_at = gen
            if params.early_stop:
                break

        keep_f = min(math.ceil(params.survival_rate * len(feasible)), half)
        keep_i = min(math.ceil(params.survival_rate * len(infeasible)), half)
        sel_f = _top_indices([(-evals[i].objective, i) for i in feasible], keep_f)
        sel_i = _top_indices([(evals[i].violations, i) for i in infeasible], keep_i)
        elite_f = [feasible[j] for j in sel_f]
        elite_i = [infeasible[j] for j in sel_i]

        # a side with no survivors borrows the other side's parents
        parents_f = [population[i] for i in (elite_f or elite_i)]
        parents_i = [population[i] for i in (elite_i or elite_f)]

        rng = make_rng(params.seed, gen)
        children_f = reproduce(parents_f, half - keep_f, params, rng)
        children_i = reproduce(parents_i, half - keep_i, params, rng)

        population = (
            [population[i] for i in elite_f] + children_f
            + [population[i] for i in elite_i] + children_i
        )
        evals = (
            [evals[i] for i in elite_f] + [None] * len(children_f)
            + [evals[i] for i in elite_i] + [None] * len(children_i)
        )

    return _record("fi2pop", params, problem, trace, converged_at,
                   generations_run, started, best_genome, best_fitness)


def run_method(method: str, params: EvoParams, problem: Problem,
               observer=None) -> RunRecord:
    if method == "baseline":
        return evolve_baseline(params, problem, observer)
    if method == "fi2pop":
        return evolve_fi2pop(params, problem, observer)
    if method in ("evo1d", "evo2d"):
        return evolve_action_sequence(params, problem, METHOD_LAYOUTS[method],
                                      observer)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


# ---------------------------------------------------------------------------
# tuned defaults, per objective family and method
# ---------------------------------------------------------------------------

_U, _O = CrossoverMethod.UNIFORM, CrossoverMethod.ONE_POINT

_TUNED: dict[tuple[str, str], tuple[int, float, float, float, CrossoverMethod, float]] = {
    # (mutated mean, mutated std, noise std, survival, crossover, cross_or_mutate)
    ("binary", "baseline"): (89, 157.2498, 0.0810, 0.5211, _O, 0.8324),
    ("binary", "fi2pop"): (162, 196.1993, 0.0418, 0.3552, _O, 0.9871),
    ("binary", "evo1d"): (97, 120.0876, 0.1296, 0.4151, _O, 0.7453),
    ("binary", "evo2d"): (44, 28.2708, 0.1409, 0.2328, _U, 0.9557),
    ("river", "baseline"): (1, 56.7544, 0.1452, 0.7988, _O, 0.9633),
    ("river", "fi2pop"): (142, 69.3442, 0.0413, 0.4726, _O, 0.9130),
    ("river", "evo1d"): (79, 111.7231, 0.1087, 0.4133, _O, 0.9930),
    ("river", "evo2d"): (48, 14.0969, 0.0647, 0.3077, _U, 0.8902),
    ("field", "baseline"): (86, 146.9724, 0.3916, 0.7513, _U, 0.6876),
    ("field", "fi2pop"): (178, 68.7875, 0.0125, 0.7720, _U, 0.7570),
    ("field", "evo1d"): (23, 0.5458, 0.4937, 0.1861, _O, 0.8241),
    ("field", "evo2d"): (132, 56.0667, 0.0407, 0.3245, _O, 0.8415),
}


def objective_family(kind: ObjectiveKind) -> str:
    if kind in (ObjectiveKind.RIVER, ObjectiveKind.HYBRID_RIVER_BINARY):
        return "river"
    if kind in (ObjectiveKind.FIELD, ObjectiveKind.HYBRID_FIELD_BINARY):
        return "field"
    return "binary"


def default_params(kind: ObjectiveKind, method: str, **overrides) -> EvoParams:
    """Shipped hyperparameter defaults for one objective family and method;
    keyword overrides replace individual fields."""
    mean, mstd, noise, survival, cross_method, cross_rate = _TUNED[
        (objective_family(kind), method)
    ]
    params = EvoParams(
        number_of_actions_mutated_mean=mean,
        number_of_actions_mutated_standard_deviation=mstd,
        action_noise_standard_deviation=noise,
        survival_rate=survival,
        cross_over_method=cross_method,
        cross_or_mutate=cross_rate,
    )
    return replace(params, **overrides) if overrides else params
