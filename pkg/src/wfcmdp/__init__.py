"""Tile-map generation where constraint propagation does the legality work
and evolution does the objective work.

The collapse loop is exposed three ways: a mutable Wave (observe/propagate),
an episodic environment with masked argmax actions and sparse terminal
rewards, and a batch rollout over fixed action tables. On top sit the map
objectives and three optimizers for comparing direct-map evolution against
evolution over collapse-action sequences.
"""

from .backend import available_backends, resolve_backend
from .env import CONTRADICTION_REWARD, EnvState, Layout, RolloutResult, StepOutcome, WfcEnv, decode_action, rollout
from .evolution import (
    METHODS,
    CrossoverMethod,
    EvoParams,
    Evaluation,
    Genome,
    Problem,
    RunRecord,
    crossover,
    default_params,
    evaluate_action_sequence,
    evaluate_direct,
    evolve_action_sequence,
    evolve_baseline,
    evolve_fi2pop,
    init_population,
    mutate,
    reproduce,
    run_method,
)
from .harness import (
    CellStats,
    ConfigError,
    ExperimentConfig,
    convergence_stats,
    load_config,
    run_experiment,
)
from .objectives import (
    BiomeMetrics,
    ObjectiveKind,
    ObjectiveSpec,
    binary_objective,
    field_metrics,
    field_objective,
    hybrid_objective,
    longest_shortest_path,
    river_metrics,
    river_objective,
)
from .tileset import Category, Tile, TileSet, TilesetError, count_violations, load_desk_tileset, load_tileset
from .wfc import Contradiction, Wave, collapse_and_propagate, init_wave, legal_tiles, select_next_cell

__version__ = "0.1.0"
