"""
What the attack does to community detection and node classification
====================================================================

Takes one GA-found perturbation of the karate graph and measures downstream
damage: K-means clustering of the embedding (scored with NMI against the true
factions) and logistic-regression classification (micro/macro F1), plus the
two non-embedding community algorithms the perturbation transfers to.

As in the search demo, the GA here runs only 60 generations to stay fast, so
the damage is a fraction of what a full 500-generation run inflicts (see the
acceptance suite for full-scale numbers).
"""

import numpy as np

from edattack import (
    AttackBudget,
    DeepWalkConfig,
    GaConfig,
    apply_perturbation,
    deepwalk,
    derive_rng,
    eda_attack,
    em_communities,
    f1_report,
    kmeans,
    load_dataset,
    lpa,
    nmi,
    train_logistic,
)
from edattack.downstream import stratified_split
from edattack.objective import deepwalk_embedder

ds = load_dataset("karate")
G, labels = ds.graph, ds.require_labels()

ga = GaConfig(population=20, iterations=60, elites=4, crossover_count=16, mutation_count=16)
fit_cfg = DeepWalkConfig(walks_per_node=5, walk_length=20, window=5, dim=8)
result = eda_attack(G, AttackBudget("rewire", 4), ga=ga, rng=derive_rng("demo-dmg"),
                    embedder=deepwalk_embedder(fit_cfg), workers=2)
attacked = apply_perturbation(G, result.perturbation)
print("perturbation:", result.perturbation)

eval_cfg = DeepWalkConfig(dim=16)


def evaluate(graph, tag, reps=5):
    nmis, micros, macros = [], [], []
    for r in range(reps):
        emb = deepwalk(graph, eval_cfg, derive_rng("demo-eval", tag, r))
        part = kmeans(emb, ds.num_classes, restarts=10, rng=derive_rng("demo-km", tag, r))
        nmis.append(nmi(part, labels))
        train_idx, test_idx = stratified_split(labels, 0.8, derive_rng("demo-split", r))
        model = train_logistic(emb, labels, train_idx)
        rep = f1_report(model.predict(emb[test_idx]), labels[test_idx])
        micros.append(rep.micro_f1)
        macros.append(rep.macro_f1)
    return map(float, (np.mean(nmis), np.mean(micros), np.mean(macros)))


for tag, graph in (("unattacked", G), ("attacked", attacked)):
    n, mi, ma = evaluate(graph, tag)
    print(f"{tag:10s} kmeans-NMI={n:.3f}  micro-F1={mi:.3f}  macro-F1={ma:.3f}")

# The same flips also disturb algorithms that never see an embedding.
print("\ntransfer to non-embedding community detection:")
for tag, graph in (("unattacked", G), ("attacked", attacked)):
    lpa_nmi = float(np.mean([nmi(lpa(graph, rng=derive_rng("demo-lpa", tag, s)), labels)
                             for s in range(10)]))
    em_nmi = nmi(em_communities(graph), labels)
    print(f"{tag:10s} LPA-NMI={lpa_nmi:.3f}  EM-NMI={em_nmi:.3f}")
