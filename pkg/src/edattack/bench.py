"""Experiment runner: attack x budget x repetition sweeps with CSV output.

Every row's randomness is derived from
(master_seed, dataset, attack, mode, budget, repetition[, metric, stage]) via
:mod:`edattack.rng`, so any cell of the output can be recomputed on its own.
Rows are appended to the CSV as they finish (a crashed run resumes by
skipping keys already present) and the file is rewritten in sorted key order
at the end, making the final bytes independent of scheduling.
"""

import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .attack import (
    AttackBudget,
    GaConfig,
    dba_attack,
    dice_attack,
    eda_attack,
    gda_attack,
    ra_attack,
)
from .datasets import load_dataset
from .downstream import (
    RegressionConfig,
    em_communities,
    f1_report,
    kmeans,
    lpa,
    nmi,
    stratified_split,
    train_logistic,
)
from .embed import DeepWalkConfig, deepwalk, hope
from .graph import Perturbation, apply_perturbation
from .objective import deepwalk_embedder
from .rng import derive_rng, derive_seed

__all__ = [
    "CSV_HEADER",
    "ExperimentConfig",
    "ResultRow",
    "run_experiment",
    "compute_perturbation",
    "evaluate_metrics",
    "FlipStats",
    "flip_statistics",
    "export_embedding_coordinates",
    "BASELINE_ATTACK",
]

CSV_HEADER = "dataset,attack,mode,budget_fraction,repetition,seed,metric_name,metric_value,wall_time_ms"
BASELINE_ATTACK = "unattacked"
ATTACKS = ("eda", "ra", "dice", "dba", "gda")
DOWNSTREAM_TOKENS = ("kmeans_nmi", "lr_f1", "lpa_nmi", "em_nmi")


@dataclass
class ExperimentConfig:
    dataset: object = "karate"
    embedder: str = "deepwalk"
    deepwalk: DeepWalkConfig = field(default_factory=DeepWalkConfig)
    # config for fitness evaluations inside eda/gda (defaults to `deepwalk`)
    deepwalk_fitness: DeepWalkConfig | None = None
    hope_dim: int = 16
    hope_beta: float | None = None
    ga: GaConfig = field(default_factory=lambda: GaConfig(iterations=500))
    gda_candidates: int | None = None
    attacks: list = field(default_factory=lambda: ["ra"])
    modes: list = field(default_factory=lambda: ["rewire"])
    budgets: list = field(default_factory=lambda: [0.05])
    repetitions: int = 10
    downstream: list = field(default_factory=lambda: ["kmeans_nmi"])
    kmeans_restarts: int = 10
    regression: RegressionConfig = field(default_factory=RegressionConfig)
    train_fraction: float = 0.8
    master_seed: int = 0
    output_dir: str | None = None
    data_dir: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.embedder not in ("deepwalk", "hope"):
            raise ValueError("embedder must be 'deepwalk' or 'hope'")
        for attack in self.attacks:
            if attack not in ATTACKS:
                raise ValueError(f"unknown attack {attack!r}; known: {ATTACKS}")
        for token in self.downstream:
            if token not in DOWNSTREAM_TOKENS:
                raise ValueError(f"unknown metric {token!r}; known: {DOWNSTREAM_TOKENS}")
        for frac in self.budgets:
            if not 0.0 < float(frac) <= 1.0:
                raise ValueError("budget fractions must lie in (0, 1]")
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")

    @property
    def fitness_config(self):
        return self.deepwalk_fitness or self.deepwalk

    def to_dict(self):
        out = asdict(self)
        return out

    @classmethod
    def from_dict(cls, record):
        record = dict(record)
        for name, typ in (("deepwalk", DeepWalkConfig), ("deepwalk_fitness", DeepWalkConfig),
                          ("ga", GaConfig), ("regression", RegressionConfig)):
            if isinstance(record.get(name), dict):
                record[name] = typ(**record[name])
        known = {f.name for f in fields(cls)}
        unknown = set(record) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**record)


@dataclass
class ResultRow:
    dataset: str
    attack: str
    mode: str
    budget_fraction: float
    repetition: int
    seed: int
    metric_name: str
    metric_value: float
    wall_time_ms: int

    def key(self):
        return (self.dataset, self.attack, self.mode, repr(self.budget_fraction),
                self.repetition, self.metric_name)

    def to_csv(self):
        return (f"{self.dataset},{self.attack},{self.mode},{self.budget_fraction!r},"
                f"{self.repetition},{self.seed},{self.metric_name},"
                f"{self.metric_value!r},{self.wall_time_ms}")

    @classmethod
    def from_csv(cls, line):
        parts = line.rstrip("\n").split(",")
        if len(parts) != 9:
            raise ValueError(f"bad result row: {line!r}")
        return cls(
            dataset=parts[0],
            attack=parts[1],
            mode=parts[2],
            budget_fraction=float(parts[3]),
            repetition=int(parts[4]),
            seed=int(parts[5]),
            metric_name=parts[6],
            metric_value=float(parts[7]),
            wall_time_ms=int(parts[8]),
        )


def _metric_names(token):
    return ("micro_f1", "macro_f1") if token == "lr_f1" else (token,)


def budget_count(fraction, edge_count):
    """Fraction of |E| -> flip count; at least one flip."""
    return max(1, round(float(fraction) * edge_count))


def _graph_embedder(cfg, purpose):
    if cfg.embedder == "hope":
        return lambda graph, rng: hope(graph, cfg.hope_dim, beta=cfg.hope_beta)
    dw = cfg.fitness_config if purpose == "fitness" else cfg.deepwalk
    return lambda graph, rng: deepwalk(graph, dw, rng)


def compute_perturbation(cfg, dataset, attack, mode, fraction, repetition):
    """Run one attack at the derived seed and return its perturbation."""
    graph = dataset.graph
    if attack == BASELINE_ATTACK:
        return Perturbation()
    count = budget_count(fraction, graph.m)
    budget = AttackBudget(mode, count)
    budget.validate_for(graph)
    parts = (cfg.master_seed, dataset.name, attack, mode, repr(float(fraction)), repetition)
    rng = derive_rng(*parts, "attack")
    fitness_embedder = deepwalk_embedder(cfg.fitness_config)
    if attack == "eda":
        result = eda_attack(graph, budget, ga=cfg.ga, rng=rng, embedder=fitness_embedder)
        return result.perturbation
    if attack == "ra":
        return ra_attack(graph, budget, rng)
    if attack == "dice":
        return dice_attack(graph, budget, dataset.require_labels(), rng)
    if attack == "dba":
        return dba_attack(graph, budget, rng)
    if attack == "gda":
        return gda_attack(graph, budget, m=cfg.gda_candidates, rng=rng,
                          embedder=fitness_embedder)
    raise ValueError(f"unknown attack {attack!r}")


def evaluate_metrics(cfg, dataset, graph, tokens, seed_parts):
    """Evaluate downstream tokens on a (possibly attacked) graph.

    Returns [(metric_name, value)]. Each token draws its own streams derived
    from `seed_parts` so metrics are independent of evaluation order.
    """
    labels = dataset.require_labels()
    out = []
    for token in tokens:
        if token == "kmeans_nmi":
            emb = _graph_embedder(cfg, "eval")(graph, derive_rng(*seed_parts, token, "embed"))
            part = kmeans(emb, dataset.num_classes, restarts=cfg.kmeans_restarts,
                          rng=derive_rng(*seed_parts, token, "kmeans"))
            out.append((token, nmi(part, labels)))
        elif token == "lr_f1":
            emb = _graph_embedder(cfg, "eval")(graph, derive_rng(*seed_parts, token, "embed"))
            split_rng = derive_rng(cfg.master_seed, dataset.name, "split", seed_parts[-1])
            train_idx, test_idx = stratified_split(labels, cfg.train_fraction, split_rng)
            model = train_logistic(emb, labels, train_idx, cfg.regression)
            if test_idx.size == 0:
                raise ValueError("empty test split; lower train_fraction")
            report = f1_report(model.predict(emb[test_idx]), labels[test_idx])
            out.append(("micro_f1", report.micro_f1))
            out.append(("macro_f1", report.macro_f1))
        elif token == "lpa_nmi":
            part = lpa(graph, rng=derive_rng(*seed_parts, token))
            out.append((token, nmi(part, labels)))
        elif token == "em_nmi":
            out.append((token, nmi(em_communities(graph), labels)))
        else:
            raise ValueError(f"unknown metric token {token!r}")
    return out


def _task_list(cfg):
    tasks = [(BASELINE_ATTACK, "none", 0.0, rep) for rep in range(cfg.repetitions)]
    for attack in cfg.attacks:
        for mode in cfg.modes:
            for fraction in cfg.budgets:
                for rep in range(cfg.repetitions):
                    tasks.append((attack, mode, float(fraction), rep))
    return tasks


def _read_rows(path):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        for line in fh:
            if line.strip():
                rows.append(ResultRow.from_csv(line))
    return rows


def run_experiment(cfg):
    """Execute the full sweep described by `cfg`, returning sorted rows.

    Rows already present in the output CSV are not recomputed, so an
    interrupted sweep resumes where it stopped and produces the same final
    file as an uninterrupted one.
    """
    dataset = load_dataset(cfg.dataset, data_dir=cfg.data_dir)
    out_dir = cfg.output_dir or os.environ.get("EDATTACK_OUTPUT_DIR") or os.getcwd()
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{dataset.name}_results.csv")

    rows = _read_rows(csv_path) if os.path.exists(csv_path) else []
    done = {row.key() for row in rows}
    tasks = _task_list(cfg)

    lock = threading.Lock()
    sink = open(csv_path, "a", encoding="utf-8")
    if not rows:
        sink.write(CSV_HEADER + "\n")
        sink.flush()

    def run_task(task):
        attack, mode, fraction, rep = task
        frac_repr = repr(float(fraction))
        seed = derive_seed(cfg.master_seed, dataset.name, attack, mode, frac_repr, rep)
        missing_tokens = []
        for token in cfg.downstream:
            keys = [(dataset.name, attack, mode, frac_repr, rep, name)
                    for name in _metric_names(token)]
            if any(k not in done for k in keys):
                missing_tokens.append(token)
        skip_key = (dataset.name, attack, mode, frac_repr, rep, "skipped")
        if not missing_tokens or skip_key in done:
            return []
        try:
            perturbation = compute_perturbation(cfg, dataset, attack, mode, fraction, rep)
        except ValueError:
            # infeasible budget: emit a marker row and keep sweeping
            return [ResultRow(dataset.name, attack, mode, float(fraction), rep, seed,
                              "skipped", float("nan"), 0)]
        graph = apply_perturbation(dataset.graph, perturbation)
        seed_parts = (cfg.master_seed, dataset.name, attack, mode, frac_repr, rep)
        new_rows = []
        start = time.perf_counter()
        metrics = evaluate_metrics(cfg, dataset, graph, missing_tokens, seed_parts)
        wall_ms = int(1000 * (time.perf_counter() - start))
        for name, value in metrics:
            row = ResultRow(dataset.name, attack, mode, float(fraction), rep, seed,
                            name, float(value), wall_ms)
            if row.key() not in done:
                new_rows.append(row)
        return new_rows

    try:
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
                batches = ex.map(run_task, tasks)
                for batch in batches:
                    with lock:
                        for row in batch:
                            rows.append(row)
                            done.add(row.key())
                            sink.write(row.to_csv() + "\n")
                        sink.flush()
        else:
            for task in tasks:
                for row in run_task(task):
                    rows.append(row)
                    done.add(row.key())
                    sink.write(row.to_csv() + "\n")
                sink.flush()
    finally:
        sink.close()

    rows.sort(key=lambda r: r.key())
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.to_csv() + "\n")
    return rows


# -- flip statistics ---------------------------------------------------------------


@dataclass
class FlipStats:
    added_intra: int = 0
    added_inter: int = 0
    deleted_intra: int = 0
    deleted_inter: int = 0

    def to_dict(self):
        return asdict(self)


def flip_statistics(perturbation, labels):
    """Classify each flip by whether its endpoints share a community."""
    labels = np.asarray(labels)
    stats = FlipStats()
    for kind, pairs in (("added", perturbation.additions), ("deleted", perturbation.deletions)):
        for u, v in pairs:
            if u >= labels.shape[0] or v >= labels.shape[0] or labels[u] < 0 or labels[v] < 0:
                raise ValueError(f"flip ({u}, {v}) touches an unlabeled node")
            side = "intra" if labels[u] == labels[v] else "inter"
            setattr(stats, f"{kind}_{side}", getattr(stats, f"{kind}_{side}") + 1)
    return stats


# -- embedding export ----------------------------------------------------------------


def export_embedding_coordinates(graph, path, embedder="deepwalk", dw=None,
                                 hope_dim=16, hope_beta=None, seed=0, labels=None):
    """Write the raw embedding, one `node_id v1 ... vd [label]` line per node."""
    if embedder == "deepwalk":
        matrix = deepwalk(graph, dw or DeepWalkConfig(), derive_rng(seed, "export"))
    elif embedder == "hope":
        matrix = hope(graph, hope_dim, beta=hope_beta)
    else:
        raise ValueError("embedder must be 'deepwalk' or 'hope'")
    if labels is not None:
        labels = np.asarray(labels)
        if labels.shape[0] != graph.n:
            raise ValueError("label vector length does not match the graph")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for v in range(graph.n):
                coords = " ".join(f"{x:.10g}" for x in matrix[v])
                line = f"{v} {coords}"
                if labels is not None:
                    line += f" {int(labels[v])}"
                fh.write(line + "\n")
    except OSError as exc:
        raise OSError(f"cannot write embedding to {path}: {exc}") from exc
    return path
