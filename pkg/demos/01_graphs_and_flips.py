"""
Graphs, edge flips, and the size of the attack search space
============================================================

Walks through the core data model: loading an edge list, applying a
perturbation (a set of added and deleted links), and counting how many
candidate attacks a flip budget allows.
"""

from edattack import Perturbation, apply_perturbation, load_dataset, search_space_size
from edattack.bench import flip_statistics
from edattack.datasets import karate_groups4

# The karate club network ships with the package: 34 members, 78 friendships.
ds = load_dataset("karate")
G = ds.graph
print(f"{ds.name}: {G.n} nodes, {G.m} edges, {G.non_edge_count} non-edges")

# A perturbation adds non-edges and deletes existing edges. This one mirrors a
# single-rewire attack: connect members 4 and 19, disconnect 23 and 29.
flip = Perturbation(additions=[(4, 19)], deletions=[(23, 29)])
attacked = apply_perturbation(G, flip)
print(f"after one rewire: {attacked.m} edges (unchanged), "
      f"(4,19) present: {attacked.has_edge(4, 19)}, "
      f"(23,29) present: {attacked.has_edge(23, 29)}")

# Perturbations are invertible: applying the swapped sets restores the graph.
restored = apply_perturbation(attacked, flip.inverse())
print("round trip restores the original graph:", restored == G)

# Against a four-group reference labeling, this particular rewire adds a link
# BETWEEN groups and deletes one WITHIN a group.
groups = karate_groups4()
stats = flip_statistics(flip, groups)
print("flip classification vs 4 groups:", stats.to_dict())

# The search space explodes combinatorially with the budget: C(|E|,u)*C(|nonE|,u).
for u in (1, 2, 4, 8):
    print(f"budget u={u}: {search_space_size(G, u):,} candidate rewire sets")
