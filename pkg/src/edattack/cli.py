"""Command-line front end.

Subcommands: ``attack`` (one attack run -> JSON record), ``sweep`` (config
file -> CSV), ``eval`` (metrics for a graph/perturbation), ``stats`` (flip
statistics) and ``export-embedding``. All outputs are deterministic given the
seed/config except wall-time fields. The EDATTACK_OUTPUT_DIR environment
variable supplies the default output directory.
"""

import argparse
import json
import os
import sys

from .attack import AttackBudget, GaConfig
from .bench import (
    BASELINE_ATTACK,
    CSV_HEADER,
    ExperimentConfig,
    ResultRow,
    budget_count,
    evaluate_metrics,
    export_embedding_coordinates,
    flip_statistics,
    run_experiment,
)
from .datasets import Dataset, load_dataset
from .embed import DeepWalkConfig
from .graph import Perturbation, apply_perturbation, read_edge_list, read_labels
from .objective import deepwalk_embedder
from .rng import derive_rng, derive_seed

from . import attack as attack_mod


def _out_dir(value):
    return value or os.environ.get("EDATTACK_OUTPUT_DIR") or os.getcwd()


def _load_dataset_args(args):
    if args.dataset:
        return load_dataset(args.dataset, data_dir=getattr(args, "data_dir", None))
    if not args.edges:
        raise SystemExit("pass --dataset NAME or --edges FILE")
    graph = read_edge_list(args.edges)
    labels = read_labels(args.labels, n=graph.n) if args.labels else None
    name = args.name or os.path.splitext(os.path.basename(args.edges))[0]
    return Dataset(name, graph, labels)


def _dw_config(args):
    return DeepWalkConfig(
        walks_per_node=args.walks,
        walk_length=args.walk_length,
        window=args.window,
        dim=args.dim,
    )


def _write_json(payload, path):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _read_perturbation(path):
    with open(path, "r", encoding="utf-8") as fh:
        record = json.load(fh)
    if "perturbation" in record:
        record = record["perturbation"]
    return Perturbation.from_dict(record)


def cmd_attack(args):
    dataset = _load_dataset_args(args)
    graph = dataset.graph
    count = args.count if args.count else budget_count(args.fraction, graph.m)
    budget = AttackBudget(args.mode, count)
    budget.validate_for(graph)
    rng = derive_rng(args.seed, dataset.name, args.attack, args.mode, count)
    record = {
        "dataset": dataset.name,
        "attack": args.attack,
        "mode": args.mode,
        "budget": count,
        "seed": args.seed,
        "history": [],
    }
    dw = _dw_config(args)
    embedder = deepwalk_embedder(dw)
    if args.attack == "eda":
        ga = GaConfig(
            population=args.population,
            iterations=args.iterations,
            elites=args.elites,
            crossover_count=args.crossover_count,
            mutation_count=args.mutation_count,
            p_c=args.p_c,
            p_m=args.p_m,
        )
        result = attack_mod.eda_attack(graph, budget, ga=ga, rng=rng,
                                       embedder=embedder, workers=args.workers)
        perturbation = result.perturbation
        record["history"] = [
            {"gen": g, "best_fitness": float(b), "mean_fitness": float(m)}
            for g, (b, m) in enumerate(zip(result.best_history, result.mean_history))
        ]
        record["best_fitness"] = result.best_fitness
        record["evaluations"] = result.evaluations
    elif args.attack == "ra":
        perturbation = attack_mod.ra_attack(graph, budget, rng)
    elif args.attack == "dice":
        perturbation = attack_mod.dice_attack(graph, budget, dataset.require_labels(), rng)
    elif args.attack == "dba":
        perturbation = attack_mod.dba_attack(graph, budget, rng)
    elif args.attack == "gda":
        perturbation = attack_mod.gda_attack(graph, budget, m=args.gda_candidates,
                                             rng=rng, embedder=embedder, workers=args.workers)
    else:
        raise SystemExit(f"unknown attack {args.attack!r}")
    record["perturbation"] = perturbation.to_dict()
    _write_json(record, args.out)
    return 0


def cmd_sweep(args):
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = ExperimentConfig.from_dict(json.load(fh))
    if args.output_dir:
        cfg.output_dir = args.output_dir
    if args.workers:
        cfg.workers = args.workers
    rows = run_experiment(cfg)
    print(f"{len(rows)} rows -> {_out_dir(cfg.output_dir)}")
    return 0


def cmd_eval(args):
    dataset = _load_dataset_args(args)
    perturbation = _read_perturbation(args.perturbation) if args.perturbation else Perturbation()
    graph = apply_perturbation(dataset.graph, perturbation)
    cfg = ExperimentConfig(
        dataset=dataset.name,
        embedder=args.embedder,
        deepwalk=_dw_config(args),
        hope_dim=args.dim,
        downstream=args.metrics.split(","),
        master_seed=args.seed,
        kmeans_restarts=args.kmeans_restarts,
    )
    attack_name = args.attack_name or ("perturbed" if args.perturbation else BASELINE_ATTACK)
    seed_parts = (args.seed, dataset.name, attack_name, "eval", repr(0.0), 0)
    metrics = evaluate_metrics(cfg, dataset, graph, cfg.downstream, seed_parts)
    seed = derive_seed(*seed_parts)
    lines = [CSV_HEADER]
    for name, value in metrics:
        row = ResultRow(dataset.name, attack_name, "eval", 0.0, 0, seed, name, float(value), 0)
        lines.append(row.to_csv())
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def cmd_stats(args):
    labels = read_labels(args.labels)
    perturbation = _read_perturbation(args.perturbation)
    stats = flip_statistics(perturbation, labels)
    _write_json(stats.to_dict(), args.out)
    return 0


def cmd_export(args):
    dataset = _load_dataset_args(args)
    export_embedding_coordinates(
        dataset.graph,
        args.out,
        embedder=args.embedder,
        dw=_dw_config(args),
        hope_dim=args.dim,
        seed=args.seed,
        labels=dataset.labels,
    )
    return 0


def _add_dataset_args(p):
    p.add_argument("--dataset", help="bundled/fetched dataset name (e.g. karate)")
    p.add_argument("--edges", help="edge-list file (alternative to --dataset)")
    p.add_argument("--labels", help="label file for --edges")
    p.add_argument("--name", help="dataset name used in records (with --edges)")
    p.add_argument("--data-dir", help="directory for fetched datasets")


def _add_embed_args(p):
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--walks", type=int, default=10)
    p.add_argument("--walk-length", type=int, default=40)
    p.add_argument("--window", type=int, default=5)


def build_parser():
    parser = argparse.ArgumentParser(prog="edattack",
                                     description="attacks on network embeddings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("attack", help="run one attack, write a JSON record")
    _add_dataset_args(p)
    _add_embed_args(p)
    p.add_argument("--attack", required=True, choices=["eda", "ra", "dice", "dba", "gda"])
    p.add_argument("--mode", default="rewire", choices=["add_only", "delete_only", "rewire"])
    p.add_argument("--count", type=int, help="flip budget (overrides --fraction)")
    p.add_argument("--fraction", type=float, default=0.05, help="budget as fraction of |E|")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--population", type=int, default=20)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--elites", type=int, default=4)
    p.add_argument("--crossover-count", type=int, default=16)
    p.add_argument("--mutation-count", type=int, default=16)
    p.add_argument("--p-c", type=float, default=0.6)
    p.add_argument("--p-m", type=float, default=0.08)
    p.add_argument("--gda-candidates", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="-", help="output JSON path ('-' = stdout)")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sweep", help="run an experiment config, write CSV")
    p.add_argument("--config", required=True, help="ExperimentConfig JSON file")
    p.add_argument("--output-dir")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("eval", help="downstream metrics for a graph or perturbation")
    _add_dataset_args(p)
    _add_embed_args(p)
    p.add_argument("--perturbation", help="JSON perturbation/attack record")
    p.add_argument("--metrics", default="kmeans_nmi")
    p.add_argument("--embedder", default="deepwalk", choices=["deepwalk", "hope"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kmeans-restarts", type=int, default=10)
    p.add_argument("--attack-name", help="attack column value for the emitted rows")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="intra/inter flip statistics of a perturbation")
    p.add_argument("--perturbation", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("export-embedding", help="write raw embedding coordinates")
    _add_dataset_args(p)
    _add_embed_args(p)
    p.add_argument("--embedder", default="deepwalk", choices=["deepwalk", "hope"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
