"""Edge-flip attacks: the GA-driven search and reproducible baselines.

A candidate attack is a chromosome of `count` genes. A gene is a non-edge to
add (add_only), an edge to delete (delete_only), or an (addition, deletion)
pair (rewire). Chromosomes keep genes ordered so single-point crossover is
well defined; converting to a :class:`~edattack.graph.Perturbation` flattens
them into add/delete sets.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import Perturbation, normalize_pair, sample_non_edges
from .objective import deepwalk_embedder, distance_matrix, fitness

__all__ = [
    "MODES",
    "AttackBudget",
    "GaConfig",
    "AttackResult",
    "Chromosome",
    "GenePool",
    "select_parent",
    "crossover",
    "mutate",
    "eda_attack",
    "ra_attack",
    "dice_attack",
    "dba_attack",
    "gda_attack",
]

MODES = ("add_only", "delete_only", "rewire")


@dataclass
class AttackBudget:
    """Attack mode plus the number of genes (flips or rewire pairs)."""

    mode: str
    count: int

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        self.count = int(self.count)
        if self.count < 1:
            raise ValueError("budget count must be positive")

    def validate_for(self, graph):
        non_edges = graph.non_edge_count
        if self.mode in ("add_only", "rewire") and self.count > non_edges:
            raise ValueError(f"budget {self.count} exceeds the {non_edges} available non-edges")
        if self.mode in ("delete_only", "rewire") and self.count > graph.m:
            raise ValueError(f"budget {self.count} exceeds the {graph.m} available edges")


@dataclass
class GaConfig:
    """Genetic-algorithm parameters.

    `truncate_by` selects how the elites+offspring union is cut back to
    `population`: "fitness" keeps the best, "random" keeps all elites and
    fills the rest uniformly from offspring. `reevaluate_elites` re-embeds
    elites every generation instead of carrying their cached fitness (breaks
    the monotone best-fitness property under noisy fitness; off by default).
    """

    population: int = 20
    iterations: int = 1000
    elites: int = 4
    crossover_count: int = 16
    mutation_count: int = 16
    p_c: float = 0.6
    p_m: float = 0.08
    reevaluate_elites: bool = False
    truncate_by: str = "fitness"

    def __post_init__(self):
        if self.population < 1:
            raise ValueError("population must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")
        if self.elites < 0 or self.crossover_count < 0 or self.mutation_count < 0:
            raise ValueError("elites / crossover_count / mutation_count must be nonnegative")
        if self.elites > self.population:
            raise ValueError("elites cannot exceed the population size")
        if not (0.0 <= self.p_c <= 1.0 and 0.0 <= self.p_m <= 1.0):
            raise ValueError("p_c and p_m must be probabilities")
        if self.elites == 0 and self.crossover_count + self.mutation_count == 0:
            raise ValueError("nothing to evolve: no elites and no offspring")
        if self.truncate_by not in ("fitness", "random"):
            raise ValueError("truncate_by must be 'fitness' or 'random'")


@dataclass
class AttackResult:
    """Best perturbation found plus the search trace."""

    perturbation: Perturbation
    best_fitness: float
    best_history: np.ndarray
    mean_history: np.ndarray
    evaluations: int


class Chromosome:
    """Ordered gene tuple for one budget mode."""

    __slots__ = ("mode", "genes")

    def __init__(self, mode, genes):
        self.mode = mode
        self.genes = tuple(genes)

    def __len__(self):
        return len(self.genes)

    def __eq__(self, other):
        if not isinstance(other, Chromosome):
            return NotImplemented
        return self.mode == other.mode and self.genes == other.genes

    def __hash__(self):
        return hash((self.mode, self.genes))

    def add_pairs(self):
        if self.mode == "add_only":
            return [g for g in self.genes]
        if self.mode == "rewire":
            return [g[0] for g in self.genes]
        return []

    def del_pairs(self):
        if self.mode == "delete_only":
            return [g for g in self.genes]
        if self.mode == "rewire":
            return [g[1] for g in self.genes]
        return []

    def to_perturbation(self):
        return Perturbation(additions=self.add_pairs(), deletions=self.del_pairs())

    def __repr__(self):
        return f"Chromosome({self.mode}, {list(self.genes)})"


def _gene_halves(mode, gene):
    """(addition pair or None, deletion pair or None) of one gene."""
    if mode == "add_only":
        return gene, None
    if mode == "delete_only":
        return None, gene
    return gene[0], gene[1]


class GenePool:
    """Uniform sampling of valid genes, with exclusion sets.

    Edges are always materialized; the non-edge complement only when the pair
    count is small enough, otherwise sampling rejects over random pairs.
    """

    def __init__(self, graph):
        self.graph = graph
        self.edges = graph.sorted_edges()
        self.materialized = graph.pair_count <= 10**6
        self.non_edge_list = graph.non_edges() if self.materialized else None

    def sample_edge(self, rng, exclude=frozenset()):
        pool = self.edges
        for _ in range(64):
            pair = pool[int(rng.integers(len(pool)))]
            if pair not in exclude:
                return pair
        remaining = [p for p in pool if p not in exclude]
        if not remaining:
            raise ValueError("no edge left to sample outside the exclusion set")
        return remaining[int(rng.integers(len(remaining)))]

    def sample_non_edge(self, rng, exclude=frozenset()):
        if self.materialized:
            pool = self.non_edge_list
            if not pool:
                raise ValueError("graph has no non-edges")
            for _ in range(64):
                pair = pool[int(rng.integers(len(pool)))]
                if pair not in exclude:
                    return pair
            remaining = [p for p in pool if p not in exclude]
            if not remaining:
                raise ValueError("no non-edge left to sample outside the exclusion set")
            return remaining[int(rng.integers(len(remaining)))]
        n = self.graph.n
        while True:
            u = int(rng.integers(n))
            v = int(rng.integers(n))
            if u == v:
                continue
            pair = (u, v) if u < v else (v, u)
            if pair in self.graph.edges or pair in exclude:
                continue
            return pair

    def sample_gene(self, mode, rng, used_adds=frozenset(), used_dels=frozenset()):
        if mode == "add_only":
            return self.sample_non_edge(rng, used_adds)
        if mode == "delete_only":
            return self.sample_edge(rng, used_dels)
        return (self.sample_non_edge(rng, used_adds), self.sample_edge(rng, used_dels))

    def random_chromosome(self, mode, count, rng):
        genes = []
        adds, dels = set(), set()
        for _ in range(count):
            gene = self.sample_gene(mode, rng, adds, dels)
            a, d = _gene_halves(mode, gene)
            if a is not None:
                adds.add(a)
            if d is not None:
                dels.add(d)
            genes.append(gene)
        return Chromosome(mode, genes)

    def repair(self, chromosome, rng):
        """Resample genes colliding with an earlier gene on either half."""
        adds, dels = set(), set()
        genes = []
        for gene in chromosome.genes:
            a, d = _gene_halves(chromosome.mode, gene)
            if (a is not None and a in adds) or (d is not None and d in dels):
                gene = self.sample_gene(chromosome.mode, rng, adds, dels)
                a, d = _gene_halves(chromosome.mode, gene)
            if a is not None:
                adds.add(a)
            if d is not None:
                dels.add(d)
            genes.append(gene)
        return Chromosome(chromosome.mode, genes)


def select_parent(population, rng):
    """Roulette-wheel draw proportional to fitness; uniform when all zero."""
    if not population:
        raise ValueError("population is empty")
    fits = np.array([f for _, f in population], dtype=np.float64)
    total = fits.sum()
    if total <= 0.0:
        idx = int(rng.integers(len(population)))
    else:
        cum = np.cumsum(fits / total)
        cum[-1] = 1.0
        idx = int(np.searchsorted(cum, rng.random(), side="right"))
    return population[idx][0]


def crossover(a, b, p_c, rng, pool=None):
    """Single-point crossover: with probability p_c exchange gene tails.

    Chromosomes of length 1 have no interior cut point and are returned as
    copies. Children whose exchanged tails collide with their heads are
    repaired by resampling the colliding genes (requires `pool`).
    """
    if a.mode != b.mode or len(a) != len(b):
        raise ValueError("parents must share mode and gene count")
    count = len(a)
    if count < 2:
        return Chromosome(a.mode, a.genes), Chromosome(b.mode, b.genes)
    if rng.random() >= p_c:
        return Chromosome(a.mode, a.genes), Chromosome(b.mode, b.genes)
    cut = int(rng.integers(1, count))
    child1 = Chromosome(a.mode, a.genes[:cut] + b.genes[cut:])
    child2 = Chromosome(b.mode, b.genes[:cut] + a.genes[cut:])
    if pool is not None:
        child1 = pool.repair(child1, rng)
        child2 = pool.repair(child2, rng)
    return child1, child2


def mutate(chromosome, p_m, rng, pool):
    """Independently resample each gene with probability p_m.

    A replacement gene is drawn uniformly among genes that do not collide with
    the *other* genes of the chromosome (the slot being mutated stays in the
    candidate pool, so a forced mutation on a one-gene pool is a no-op).
    """
    genes = list(chromosome.genes)
    for i in range(len(genes)):
        if rng.random() >= p_m:
            continue
        adds, dels = set(), set()
        for j, gene in enumerate(genes):
            if j == i:
                continue
            a, d = _gene_halves(chromosome.mode, gene)
            if a is not None:
                adds.add(a)
            if d is not None:
                dels.add(d)
        genes[i] = pool.sample_gene(chromosome.mode, rng, adds, dels)
    return Chromosome(chromosome.mode, genes)


def eda_attack(graph, budget, ga=None, dw=None, rng=None, embedder=None, workers=1):
    """Search for the most distance-disrupting perturbation with a GA.

    Each generation evaluates offspring fitness (one embedding per
    individual, independent derived streams, optionally in `workers`
    threads), carries the `elites` best individuals with cached fitness and
    refills the population via roulette selection, crossover and mutation.
    Returns the best individual ever seen plus per-generation best/mean
    fitness of the population.
    """
    if rng is None:
        raise ValueError("eda_attack requires an explicit seeded generator")
    budget.validate_for(graph)
    ga = ga or GaConfig()
    if embedder is None:
        embedder = deepwalk_embedder(dw)
    run_key = int(rng.integers(1 << 62))

    ref_rng = np.random.default_rng([run_key, 0, 0])
    d_ref = distance_matrix(embedder(graph, ref_rng))

    pool = GenePool(graph)
    population = [pool.random_chromosome(budget.mode, budget.count, rng)
                  for _ in range(ga.population)]

    evaluations = 0
    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def evaluate(chromosomes, generation):
        nonlocal evaluations
        def one(item):
            idx, chrom = item
            stream = np.random.default_rng([run_key, 1 + generation, idx])
            return fitness(graph, chrom.to_perturbation(), d_ref, embedder, stream)
        items = list(enumerate(chromosomes))
        if executor is not None:
            fits = list(executor.map(one, items))
        else:
            fits = [one(item) for item in items]
        evaluations += len(items)
        return fits

    try:
        fits = evaluate(population, 0)
        scored = list(zip(population, fits))
        best_chrom, best_fit = max(scored, key=lambda cf: cf[1])
        best_history = [max(fits)]
        mean_history = [float(np.mean(fits))]

        for gen in range(1, ga.iterations + 1):
            order = sorted(range(len(scored)), key=lambda i: (-scored[i][1], i))
            elites = [scored[i] for i in order[: ga.elites]]

            offspring = []
            while len(offspring) < ga.crossover_count:
                p1 = select_parent(scored, rng)
                p2 = select_parent(scored, rng)
                c1, c2 = crossover(p1, p2, ga.p_c, rng, pool)
                offspring.append(c1)
                if len(offspring) < ga.crossover_count:
                    offspring.append(c2)
            for _ in range(ga.mutation_count):
                offspring.append(mutate(select_parent(scored, rng), ga.p_m, rng, pool))

            to_eval = list(offspring)
            if ga.reevaluate_elites:
                to_eval += [c for c, _ in elites]
            new_fits = evaluate(to_eval, gen)
            if ga.reevaluate_elites:
                elite_fits = new_fits[len(offspring):]
                elites = [(c, f) for (c, _), f in zip(elites, elite_fits)]
                new_fits = new_fits[: len(offspring)]

            candidates = elites + list(zip(offspring, new_fits))
            if ga.truncate_by == "fitness":
                candidates.sort(key=lambda cf: -cf[1])
                scored = candidates[: ga.population]
            else:
                fill = ga.population - len(elites)
                rest = list(zip(offspring, new_fits))
                if fill >= len(rest):
                    scored = elites + rest
                else:
                    picked = rng.choice(len(rest), size=fill, replace=False)
                    scored = elites + [rest[i] for i in np.sort(picked)]

            gen_best_chrom, gen_best_fit = max(scored, key=lambda cf: cf[1])
            if gen_best_fit > best_fit:
                best_chrom, best_fit = gen_best_chrom, gen_best_fit
            best_history.append(gen_best_fit)
            mean_history.append(float(np.mean([f for _, f in scored])))
    finally:
        if executor is not None:
            executor.shutdown()

    return AttackResult(
        perturbation=best_chrom.to_perturbation(),
        best_fitness=float(best_fit),
        best_history=np.array(best_history),
        mean_history=np.array(mean_history),
        evaluations=evaluations,
    )


# -- baselines -------------------------------------------------------------------


def ra_attack(graph, budget, rng):
    """Uniform random perturbation of the given budget."""
    budget.validate_for(graph)
    deletions, additions = [], []
    if budget.mode in ("delete_only", "rewire"):
        edges = graph.sorted_edges()
        idx = rng.choice(len(edges), size=budget.count, replace=False)
        deletions = [edges[i] for i in np.sort(idx)]
    if budget.mode in ("add_only", "rewire"):
        additions = sample_non_edges(graph, budget.count, rng)
    return Perturbation(additions=additions, deletions=deletions)


def _draw_with_fallback(primary, full, count, rng):
    """count draws preferring `primary`; exhausted pools fall back to `full`."""
    if len(primary) >= count:
        idx = rng.choice(len(primary), size=count, replace=False)
        return [primary[i] for i in np.sort(idx)]
    chosen = list(primary)
    rest = [x for x in full if x not in set(chosen)]
    extra = count - len(chosen)
    if extra > len(rest):
        raise ValueError("budget exceeds the total candidate pool")
    idx = rng.choice(len(rest), size=extra, replace=False)
    return chosen + [rest[i] for i in np.sort(idx)]


def dice_attack(graph, budget, labels, rng):
    """Delete within communities, add between them (needs true labels)."""
    budget.validate_for(graph)
    labels = np.asarray(labels)
    if labels.shape[0] != graph.n or (labels < 0).any():
        raise ValueError("dice_attack needs a complete label vector")
    deletions, additions = [], []
    if budget.mode in ("delete_only", "rewire"):
        edges = graph.sorted_edges()
        intra = [e for e in edges if labels[e[0]] == labels[e[1]]]
        deletions = _draw_with_fallback(intra, edges, budget.count, rng)
    if budget.mode in ("add_only", "rewire"):
        if graph.pair_count <= 10**6:
            non_edges = graph.non_edges()
            inter = [p for p in non_edges if labels[p[0]] != labels[p[1]]]
            additions = _draw_with_fallback(inter, non_edges, budget.count, rng)
        else:
            additions = _sample_inter_non_edges(graph, labels, budget.count, rng)
    return Perturbation(additions=additions, deletions=deletions)


def _sample_inter_non_edges(graph, labels, count, rng):
    picked = set()
    out = []
    n = graph.n
    attempts = 0
    cap = 200 * count + 1000
    while len(out) < count and attempts < cap:
        attempts += 1
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        if u == v:
            continue
        pair = (u, v) if u < v else (v, u)
        if pair in picked or pair in graph.edges or labels[u] == labels[v]:
            continue
        picked.add(pair)
        out.append(pair)
    while len(out) < count:  # inter pool exhausted: any non-edge
        pair = tuple(sample_non_edges(graph, 1, rng)[0])
        if pair not in picked:
            picked.add(pair)
            out.append(pair)
    return out


def dba_attack(graph, budget, rng):
    """Degree-based heuristic: hit the current highest-degree node each step.

    Delete steps remove a random present original edge at a maximum-degree
    node; add steps connect a maximum-degree node to its minimum-degree
    non-neighbor. Degrees are recomputed after every step; rewire mode
    alternates delete, add. Steps with no valid candidate fall back to a
    random valid flip.
    """
    budget.validate_for(graph)
    degrees = graph.degrees.copy()
    neighbor_sets = [set(map(int, a)) for a in graph.adj]
    added, deleted = set(), set()

    if budget.mode == "delete_only":
        steps = ["del"] * budget.count
    elif budget.mode == "add_only":
        steps = ["add"] * budget.count
    else:
        steps = ["del", "add"] * budget.count

    def max_degree_node():
        cands = np.flatnonzero(degrees == degrees.max())
        return int(cands[rng.integers(len(cands))])

    for step in steps:
        if step == "del":
            hub = max_degree_node()
            cands = sorted(
                nb for nb in neighbor_sets[hub]
                if normalize_pair(hub, nb) in graph.edges
                and normalize_pair(hub, nb) not in deleted
            )
            if cands:
                other = cands[int(rng.integers(len(cands)))]
                pair = normalize_pair(hub, other)
            else:
                remaining = [e for e in graph.sorted_edges()
                             if e not in deleted and e[1] in neighbor_sets[e[0]]]
                pair = remaining[int(rng.integers(len(remaining)))]
            deleted.add(pair)
            u, v = pair
            neighbor_sets[u].discard(v)
            neighbor_sets[v].discard(u)
            degrees[u] -= 1
            degrees[v] -= 1
        else:
            hub = max_degree_node()
            cands = [v for v in range(graph.n)
                     if v != hub and v not in neighbor_sets[hub]
                     and normalize_pair(hub, v) not in graph.edges]
            if cands:
                cand_degs = degrees[cands]
                lowest = [v for v, d in zip(cands, cand_degs) if d == cand_degs.min()]
                other = lowest[int(rng.integers(len(lowest)))]
                pair = normalize_pair(hub, other)
            else:
                pool = GenePool(graph)
                pair = pool.sample_non_edge(rng, exclude=added)
                while pair[1] in neighbor_sets[pair[0]]:
                    pair = pool.sample_non_edge(rng, exclude=added)
            added.add(pair)
            u, v = pair
            neighbor_sets[u].add(v)
            neighbor_sets[v].add(u)
            degrees[u] += 1
            degrees[v] += 1

    return Perturbation(additions=added, deletions=deleted)


def gda_attack(graph, budget, dw=None, m=None, rng=None, embedder=None, workers=1):
    """Sampled greedy attack: rank m candidate genes by single-gene fitness.

    Draws m distinct candidate genes uniformly, scores each as a single-gene
    perturbation against the reference embedding (fresh derived stream per
    candidate) and returns the top `count`, skipping genes that collide with
    already-selected ones so the budget is met exactly.
    """
    if rng is None:
        raise ValueError("gda_attack requires an explicit seeded generator")
    budget.validate_for(graph)
    if embedder is None:
        embedder = deepwalk_embedder(dw)
    pool = GenePool(graph)

    if budget.mode == "add_only":
        pool_size = graph.non_edge_count
    elif budget.mode == "delete_only":
        pool_size = graph.m
    else:
        pool_size = graph.non_edge_count * graph.m
    if m is None:
        m = min(20 * budget.count, pool_size)
    m = int(m)
    if m < budget.count:
        raise ValueError(f"candidate count m={m} is below the budget {budget.count}")
    if m > pool_size:
        raise ValueError(f"candidate count m={m} exceeds the pool of {pool_size} genes")

    candidates = _sample_distinct_genes(graph, pool, budget.mode, m, rng)

    run_key = int(rng.integers(1 << 62))
    ref_rng = np.random.default_rng([run_key, 0, 0])
    d_ref = distance_matrix(embedder(graph, ref_rng))

    def score(item):
        idx, gene = item
        chrom = Chromosome(budget.mode, [gene])
        stream = np.random.default_rng([run_key, 1, idx])
        return fitness(graph, chrom.to_perturbation(), d_ref, embedder, stream)

    items = list(enumerate(candidates))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            fits = list(ex.map(score, items))
    else:
        fits = [score(item) for item in items]

    order = np.argsort(-np.array(fits), kind="stable")
    chosen, adds, dels = [], set(), set()
    for idx in order:
        gene = candidates[idx]
        a, d = _gene_halves(budget.mode, gene)
        if (a is not None and a in adds) or (d is not None and d in dels):
            continue
        chosen.append(gene)
        if a is not None:
            adds.add(a)
        if d is not None:
            dels.add(d)
        if len(chosen) == budget.count:
            break
    while len(chosen) < budget.count:  # collisions starved the ranking
        gene = pool.sample_gene(budget.mode, rng, adds, dels)
        a, d = _gene_halves(budget.mode, gene)
        if a is not None:
            adds.add(a)
        if d is not None:
            dels.add(d)
        chosen.append(gene)
    return Chromosome(budget.mode, chosen).to_perturbation()


def _sample_distinct_genes(graph, pool, mode, m, rng):
    if mode == "add_only":
        return [tuple(p) for p in sample_non_edges(graph, m, rng)]
    if mode == "delete_only":
        edges = pool.edges
        idx = rng.choice(len(edges), size=m, replace=False)
        return [edges[i] for i in np.sort(idx)]
    edges = pool.edges
    if pool.materialized:
        non_edges = pool.non_edge_list
        total = len(non_edges) * len(edges)
        if total <= 10**7:
            flat = rng.choice(total, size=m, replace=False)
            return [(non_edges[i // len(edges)], edges[i % len(edges)])
                    for i in np.sort(flat)]
    seen = set()
    genes = []
    while len(genes) < m:
        gene = (pool.sample_non_edge(rng), pool.sample_edge(rng))
        if gene in seen:
            continue
        seen.add(gene)
        genes.append(gene)
    return genes
