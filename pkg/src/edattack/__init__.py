"""Attacks on network embeddings through distance-structure disruption.

The package splits into small layers: :mod:`edattack.graph` (graphs and edge
flips), :mod:`edattack.embed` (skip-gram walks and Katz-SVD embeddings),
:mod:`edattack.objective` (the distance-correlation objective),
:mod:`edattack.attack` (the GA search plus baselines),
:mod:`edattack.downstream` (clustering/classification metrics) and
:mod:`edattack.bench` (experiment sweeps, CSV output, CLI backend).
"""

from .attack import (
    AttackBudget,
    AttackResult,
    GaConfig,
    dba_attack,
    dice_attack,
    eda_attack,
    gda_attack,
    ra_attack,
)
from .bench import (
    ExperimentConfig,
    ResultRow,
    export_embedding_coordinates,
    flip_statistics,
    run_experiment,
)
from .datasets import Dataset, fetch_dataset, load_dataset
from .downstream import em_communities, f1_report, kmeans, lpa, modularity, nmi, train_logistic
from .embed import DeepWalkConfig, deepwalk, hope, random_walks
from .graph import (
    Graph,
    Perturbation,
    apply_perturbation,
    load_edge_list,
    sample_non_edges,
    search_space_size,
)
from .objective import distance_matrix, fitness, row_correlation, row_correlation_sum
from .rng import derive_rng, derive_seed

__version__ = "0.1.0"

__all__ = [
    "AttackBudget",
    "AttackResult",
    "GaConfig",
    "DeepWalkConfig",
    "ExperimentConfig",
    "ResultRow",
    "Graph",
    "Perturbation",
    "Dataset",
    "load_edge_list",
    "load_dataset",
    "fetch_dataset",
    "apply_perturbation",
    "sample_non_edges",
    "search_space_size",
    "random_walks",
    "deepwalk",
    "hope",
    "distance_matrix",
    "row_correlation",
    "row_correlation_sum",
    "fitness",
    "eda_attack",
    "ra_attack",
    "dice_attack",
    "dba_attack",
    "gda_attack",
    "kmeans",
    "nmi",
    "train_logistic",
    "f1_report",
    "lpa",
    "em_communities",
    "modularity",
    "run_experiment",
    "flip_statistics",
    "export_embedding_coordinates",
    "derive_rng",
    "derive_seed",
]
