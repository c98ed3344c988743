"""NEAT: genomes with innovation tracking, tanh feed-forward networks,
mutation, crossover, speciation, and generation turnover with elitism.

Networks are strictly feed-forward: the controllers are reactive maps
from one observation to one wheel command, so recurrence buys nothing
and would complicate determinism. Structural mutations that would close
a cycle are redrawn once and then skipped.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

INPUT = "input"
OUTPUT = "output"
HIDDEN = "hidden"

# Gene-count floor under which the compatibility normalizer N is 1.
SMALL_GENOME_SIZE = 20


class ArityMismatch(ValueError):
    """Inputs or parents do not match the genome's declared arity."""


class GenerationError(ValueError):
    """Population or fitness vector unusable for reproduction."""


class CycleError(RuntimeError):
    """Enabled connections do not form a DAG (invariant violation)."""


@dataclass
class NodeGene:
    id: int
    role: str
    bias: float = 0.0


@dataclass
class ConnectionGene:
    innovation: int
    src: int
    dst: int
    weight: float
    enabled: bool = True


@dataclass
class Genome:
    input_arity: int
    output_arity: int
    nodes: list          # NodeGene, kept sorted by id
    connections: list    # ConnectionGene, kept sorted by innovation

    def copy(self) -> "Genome":
        return Genome(
            self.input_arity,
            self.output_arity,
            [NodeGene(n.id, n.role, n.bias) for n in self.nodes],
            [ConnectionGene(c.innovation, c.src, c.dst, c.weight, c.enabled)
             for c in self.connections],
        )

    def input_ids(self):
        return list(range(self.input_arity))

    def output_ids(self):
        return list(range(self.input_arity, self.input_arity + self.output_arity))

    def node_map(self):
        return {n.id: n for n in self.nodes}


@dataclass(frozen=True)
class NeatConfig:
    population_size: int = 20
    generations: int = 100
    weight_mutate_rate: float = 0.8
    bias_mutate_rate: float = 0.7
    p_add_connection: float = 0.1
    p_delete_connection: float = 0.1
    p_add_node: float = 0.1
    p_delete_node: float = 0.1
    elites: int = 4
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 0.4
    compatibility_threshold: float = 3.0
    weight_perturb_stddev: float = 0.5
    weight_replace_prob: float = 0.1
    weight_replace_range: float = 3.0
    weight_clamp: float = 8.0
    stagnation_generations: int = 15

    def __post_init__(self):
        probs = (self.weight_mutate_rate, self.bias_mutate_rate,
                 self.p_add_connection, self.p_delete_connection,
                 self.p_add_node, self.p_delete_node,
                 self.weight_replace_prob)
        if any(not (0.0 <= p <= 1.0) for p in probs):
            raise GenerationError("mutation probabilities must be in [0, 1]")
        if self.population_size < 2:
            raise GenerationError("population_size must be >= 2")
        if not (0 <= self.elites < self.population_size):
            raise GenerationError("elites must be < population_size")


# ---------------------------------------------------------------------------
# Innovation bookkeeping

class InnovationRegistry:
    """Global historical markers for structural mutations.

    Identical structural mutations within one generation receive the same
    ids; the signature maps are cleared at each generation boundary while
    the counters only ever increase.
    """

    def __init__(self, next_innovation: int = 0, next_node_id: int = 0):
        self.next_innovation = next_innovation
        self.next_node_id = next_node_id
        self._conn_sigs: dict = {}
        self._split_sigs: dict = {}

    def begin_generation(self):
        self._conn_sigs.clear()
        self._split_sigs.clear()

    def connection_innovation(self, src: int, dst: int) -> int:
        key = (src, dst)
        if key not in self._conn_sigs:
            self._conn_sigs[key] = self.next_innovation
            self.next_innovation += 1
        return self._conn_sigs[key]

    def split_ids(self, connection_innovation: int) -> tuple[int, int, int]:
        """(new node id, incoming innovation, outgoing innovation) for
        splitting the given connection."""
        key = connection_innovation
        if key not in self._split_sigs:
            node_id = self.next_node_id
            self.next_node_id += 1
            in_innov = self.next_innovation
            out_innov = self.next_innovation + 1
            self.next_innovation += 2
            self._split_sigs[key] = (node_id, in_innov, out_innov)
        return self._split_sigs[key]

    def to_json_dict(self) -> dict:
        return {"next_innovation": self.next_innovation,
                "next_node_id": self.next_node_id}

    @classmethod
    def from_json_dict(cls, d: dict) -> "InnovationRegistry":
        return cls(d["next_innovation"], d["next_node_id"])


def initial_genome(n_inputs: int, n_outputs: int, rng: random.Random,
                   weight_range: float = 1.0) -> Genome:
    """Minimal-structure start: inputs fully connected to outputs, uniform
    random weights, zero biases, no hidden nodes.

    Innovation ids of the initial connections are canonical (input-major),
    so matching genes align across every genome of a population.
    """
    nodes = [NodeGene(i, INPUT) for i in range(n_inputs)]
    nodes += [NodeGene(n_inputs + j, OUTPUT) for j in range(n_outputs)]
    connections = []
    for i in range(n_inputs):
        for j in range(n_outputs):
            connections.append(ConnectionGene(
                innovation=i * n_outputs + j,
                src=i,
                dst=n_inputs + j,
                weight=rng.uniform(-weight_range, weight_range),
            ))
    return Genome(n_inputs, n_outputs, nodes, connections)


def fresh_registry(n_inputs: int, n_outputs: int) -> InnovationRegistry:
    return InnovationRegistry(next_innovation=n_inputs * n_outputs,
                              next_node_id=n_inputs + n_outputs)


# ---------------------------------------------------------------------------
# Activation

class Network:
    """Compiled feed-forward evaluator for one genome."""

    def __init__(self, genome: Genome):
        self.input_arity = genome.input_arity
        self.output_ids = genome.output_ids()
        incoming = {n.id: [] for n in genome.nodes}
        out_edges = {n.id: [] for n in genome.nodes}
        indegree = {n.id: 0 for n in genome.nodes}
        for c in genome.connections:
            if not c.enabled:
                continue
            incoming[c.dst].append((c.src, c.weight))
            out_edges[c.src].append(c.dst)
            indegree[c.dst] += 1

        # Kahn's algorithm with an id-sorted frontier for determinism.
        ready = sorted(nid for nid, deg in indegree.items() if deg == 0)
        order = []
        while ready:
            nid = ready.pop(0)
            order.append(nid)
            inserted = False
            for dst in out_edges[nid]:
                indegree[dst] -= 1
                if indegree[dst] == 0:
                    ready.append(dst)
                    inserted = True
            if inserted:
                ready.sort()
        if len(order) != len(genome.nodes):
            raise CycleError("enabled connections contain a cycle")

        biases = {n.id: n.bias for n in genome.nodes}
        input_set = set(genome.input_ids())
        # (node id, bias, incoming list) for every non-input node in order
        self._plan = [(nid, biases[nid], incoming[nid])
                      for nid in order if nid not in input_set]

    def activate(self, inputs) -> list:
        if len(inputs) != self.input_arity:
            raise ArityMismatch(
                f"expected {self.input_arity} inputs, got {len(inputs)}")
        values = {i: float(inputs[i]) for i in range(self.input_arity)}
        for nid, bias, incoming in self._plan:
            total = bias
            for src, weight in incoming:
                total += weight * values[src]
            values[nid] = math.tanh(total)
        return [values[o] for o in self.output_ids]


def activate(genome: Genome, inputs) -> list:
    return Network(genome).activate(inputs)


# ---------------------------------------------------------------------------
# Invariants

def _has_path(connections, start: int, goal: int) -> bool:
    """Path start -> goal over ALL connection genes (enabled or not).

    Checking against the full gene set keeps even disabled genes acyclic,
    so crossover may re-enable any inherited gene without re-checking.
    """
    adjacency = {}
    for c in connections:
        adjacency.setdefault(c.src, []).append(c.dst)
    stack = [start]
    seen = set()
    while stack:
        nid = stack.pop()
        if nid == goal:
            return True
        if nid in seen:
            continue
        seen.add(nid)
        stack.extend(adjacency.get(nid, ()))
    return False


def validate_genome(genome: Genome):
    """Raise on any structural invariant violation."""
    ids = [n.id for n in genome.nodes]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate node ids")
    node_map = genome.node_map()
    for i in genome.input_ids():
        if i not in node_map or node_map[i].role != INPUT:
            raise ValueError(f"missing/invalid input node {i}")
    for o in genome.output_ids():
        if o not in node_map or node_map[o].role != OUTPUT:
            raise ValueError(f"missing/invalid output node {o}")
    innovations = [c.innovation for c in genome.connections]
    if len(set(innovations)) != len(innovations):
        raise ValueError("duplicate innovation ids")
    enabled_pairs = [(c.src, c.dst) for c in genome.connections if c.enabled]
    if len(set(enabled_pairs)) != len(enabled_pairs):
        raise ValueError("duplicate enabled (src, dst) pair")
    for c in genome.connections:
        if c.src not in node_map or c.dst not in node_map:
            raise ValueError("connection endpoint missing")
        if node_map[c.dst].role == INPUT:
            raise ValueError("input node has an incoming connection")
        if node_map[c.src].role == OUTPUT:
            raise ValueError("output node has an outgoing connection")
    # acyclicity over enabled genes (full set is checked at mutation time)
    Network(genome)


# ---------------------------------------------------------------------------
# Mutation

def _clamp(x: float, bound: float) -> float:
    return min(max(x, -bound), bound)


def _mutate_weights(genome: Genome, config: NeatConfig, rng: random.Random):
    for c in genome.connections:
        if rng.random() >= config.weight_mutate_rate:
            continue
        if rng.random() < config.weight_replace_prob:
            c.weight = rng.uniform(-config.weight_replace_range,
                                   config.weight_replace_range)
        else:
            c.weight = _clamp(c.weight + rng.gauss(0.0, config.weight_perturb_stddev),
                              config.weight_clamp)


def _mutate_biases(genome: Genome, config: NeatConfig, rng: random.Random):
    for n in genome.nodes:
        if n.role == INPUT:
            continue
        if rng.random() < config.bias_mutate_rate:
            n.bias = _clamp(n.bias + rng.gauss(0.0, config.weight_perturb_stddev),
                            config.weight_clamp)


def _mutate_add_connection(genome: Genome, config: NeatConfig,
                           registry: InnovationRegistry, rng: random.Random):
    sources = [n.id for n in genome.nodes if n.role != OUTPUT]
    targets = [n.id for n in genome.nodes if n.role != INPUT]
    existing = {(c.src, c.dst) for c in genome.connections}
    for _ in range(2):   # one redraw, then give up
        src = rng.choice(sources)
        dst = rng.choice(targets)
        if src == dst or (src, dst) in existing:
            continue
        if _has_path(genome.connections, dst, src):
            continue
        genome.connections.append(ConnectionGene(
            innovation=registry.connection_innovation(src, dst),
            src=src, dst=dst, weight=rng.uniform(-1.0, 1.0)))
        genome.connections.sort(key=lambda c: c.innovation)
        return


def _mutate_delete_connection(genome: Genome, rng: random.Random):
    if genome.connections:
        genome.connections.remove(rng.choice(genome.connections))


def _mutate_add_node(genome: Genome, registry: InnovationRegistry,
                     rng: random.Random):
    enabled = [c for c in genome.connections if c.enabled]
    if not enabled:
        return
    conn = rng.choice(enabled)
    node_id, in_innov, out_innov = registry.split_ids(conn.innovation)
    if any(n.id == node_id for n in genome.nodes):
        # this connection was already split this generation and the genome
        # holds the resulting node (re-enabled gene split twice): skip
        return
    conn.enabled = False
    genome.nodes.append(NodeGene(node_id, HIDDEN, bias=0.0))
    genome.nodes.sort(key=lambda n: n.id)
    genome.connections.append(ConnectionGene(in_innov, conn.src, node_id, 1.0))
    genome.connections.append(ConnectionGene(out_innov, node_id, conn.dst,
                                             conn.weight))
    genome.connections.sort(key=lambda c: c.innovation)


def _mutate_delete_node(genome: Genome, rng: random.Random):
    hidden = [n for n in genome.nodes if n.role == HIDDEN]
    if not hidden:
        return
    victim = rng.choice(hidden)
    genome.nodes.remove(victim)
    genome.connections = [c for c in genome.connections
                          if c.src != victim.id and c.dst != victim.id]


def mutate(genome: Genome, config: NeatConfig, registry: InnovationRegistry,
           rng: random.Random) -> Genome:
    """Independent weight/bias perturbations and structural edits; the
    input genome is left untouched."""
    g = genome.copy()
    _mutate_weights(g, config, rng)
    _mutate_biases(g, config, rng)
    if rng.random() < config.p_add_connection:
        _mutate_add_connection(g, config, registry, rng)
    if rng.random() < config.p_delete_connection:
        _mutate_delete_connection(g, rng)
    if rng.random() < config.p_add_node:
        _mutate_add_node(g, registry, rng)
    if rng.random() < config.p_delete_node:
        _mutate_delete_node(g, rng)
    return g


# ---------------------------------------------------------------------------
# Crossover and compatibility

def crossover(parent_a: Genome, parent_b: Genome, fitness_a: float,
              fitness_b: float, rng: random.Random) -> Genome:
    """Matching genes from a random parent, disjoint/excess from the fitter
    one (random parent on a tie); genes disabled in either parent stay
    disabled in the child with probability 0.75."""
    if (parent_a.input_arity != parent_b.input_arity
            or parent_a.output_arity != parent_b.output_arity):
        raise ArityMismatch("parents have different input/output arity")

    if fitness_a > fitness_b:
        fitter, other = parent_a, parent_b
    elif fitness_b > fitness_a:
        fitter, other = parent_b, parent_a
    elif rng.random() < 0.5:
        fitter, other = parent_a, parent_b
    else:
        fitter, other = parent_b, parent_a

    other_conns = {c.innovation: c for c in other.connections}
    child_conns = []
    for gene in fitter.connections:
        match = other_conns.get(gene.innovation)
        if match is not None and rng.random() < 0.5:
            chosen = match
        else:
            chosen = gene
        enabled = chosen.enabled
        disabled_somewhere = (not gene.enabled) or (match is not None
                                                    and not match.enabled)
        if disabled_somewhere:
            enabled = not (rng.random() < 0.75)
        child_conns.append(ConnectionGene(gene.innovation, gene.src, gene.dst,
                                          chosen.weight, enabled))

    other_nodes = other.node_map()
    child_nodes = []
    for node in fitter.nodes:
        match = other_nodes.get(node.id)
        if match is not None and rng.random() < 0.5:
            bias = match.bias
        else:
            bias = node.bias
        child_nodes.append(NodeGene(node.id, node.role, bias))

    return Genome(parent_a.input_arity, parent_a.output_arity,
                  child_nodes, child_conns)


def compatibility_distance(a: Genome, b: Genome, config: NeatConfig) -> float:
    """delta = c1*E/N + c2*D/N + c3*mean(|dw|) over connection genes."""
    a_map = {c.innovation: c for c in a.connections}
    b_map = {c.innovation: c for c in b.connections}
    if not a_map and not b_map:
        return 0.0
    max_a = max(a_map) if a_map else -1
    max_b = max(b_map) if b_map else -1
    boundary = min(max_a, max_b)

    matching_diffs = []
    disjoint = 0
    excess = 0
    for innov in set(a_map) | set(b_map):
        in_a, in_b = innov in a_map, innov in b_map
        if in_a and in_b:
            matching_diffs.append(abs(a_map[innov].weight - b_map[innov].weight))
        elif innov > boundary:
            excess += 1
        else:
            disjoint += 1

    n = max(len(a_map), len(b_map))
    if len(a_map) < SMALL_GENOME_SIZE and len(b_map) < SMALL_GENOME_SIZE:
        n = 1
    mean_dw = sum(matching_diffs) / len(matching_diffs) if matching_diffs else 0.0
    return (config.c1 * excess / n + config.c2 * disjoint / n
            + config.c3 * mean_dw)


# ---------------------------------------------------------------------------
# Speciation and reproduction

@dataclass
class Species:
    representative: Genome
    members: list = field(default_factory=list)   # population indexes
    best_fitness: float = -math.inf
    staleness: int = 0


@dataclass
class Population:
    members: list
    registry: InnovationRegistry
    species: list = field(default_factory=list)


def initial_population(n_inputs: int, n_outputs: int, config: NeatConfig,
                       rng: random.Random) -> Population:
    members = [initial_genome(n_inputs, n_outputs, rng)
               for _ in range(config.population_size)]
    return Population(members, fresh_registry(n_inputs, n_outputs))


def proportionate_pick(indexes, weights, rng: random.Random):
    """Fitness-proportionate index selection; uniform if all weights are 0.
    Negative weights are shifted to zero-based before drawing."""
    lo = min(weights)
    if lo < 0.0:
        weights = [w - lo for w in weights]
    total = sum(weights)
    if total <= 0.0:
        return indexes[rng.randrange(len(indexes))]
    r = rng.random() * total
    acc = 0.0
    for idx, w in zip(indexes, weights):
        acc += w
        if r < acc:
            return idx
    return indexes[-1]


def _speciate(population: Population, config: NeatConfig) -> list:
    species = [Species(sp.representative, [], sp.best_fitness, sp.staleness)
               for sp in population.species]
    for idx, genome in enumerate(population.members):
        for sp in species:
            if compatibility_distance(genome, sp.representative,
                                      config) < config.compatibility_threshold:
                sp.members.append(idx)
                break
        else:
            species.append(Species(genome.copy(), [idx]))
    return [sp for sp in species if sp.members]


def _allocate_quotas(weights, slots: int) -> list:
    """Largest-remainder apportionment of offspring slots."""
    total = sum(weights)
    if total <= 0.0:
        weights = [1.0] * len(weights)
        total = float(len(weights))
    ideals = [slots * w / total for w in weights]
    quotas = [int(math.floor(v)) for v in ideals]
    remainder = slots - sum(quotas)
    by_fraction = sorted(range(len(weights)),
                         key=lambda i: (-(ideals[i] - quotas[i]), i))
    for i in by_fraction[:remainder]:
        quotas[i] += 1
    return quotas


def next_generation(population: Population, fitnesses, config: NeatConfig,
                    rng: random.Random) -> Population:
    """Speciate, apply stagnation, copy elites, and fill the remaining slots
    with crossover + mutation; population size is preserved."""
    members = population.members
    if not members:
        raise GenerationError("empty population")
    if len(fitnesses) != len(members):
        raise GenerationError("fitness count does not match population")
    if any(not math.isfinite(f) for f in fitnesses):
        raise GenerationError("non-finite fitness")

    registry = population.registry
    registry.begin_generation()

    species = _speciate(population, config)
    for sp in species:
        best_now = max(fitnesses[i] for i in sp.members)
        if best_now > sp.best_fitness:
            sp.best_fitness = best_now
            sp.staleness = 0
        else:
            sp.staleness += 1

    elite_idx = sorted(range(len(members)),
                       key=lambda i: (-fitnesses[i], i))[:config.elites]
    elite_set = set(elite_idx)

    alive = [sp for sp in species
             if sp.staleness < config.stagnation_generations
             or any(i in elite_set for i in sp.members)]
    if not alive:
        alive = [max(species, key=lambda sp: sp.best_fitness)]

    # Quota weight: total adjusted fitness (fitness shared across the
    # species), which equals the species' mean raw fitness.
    weights = []
    for sp in alive:
        shift = min(0.0, min(fitnesses[i] for i in sp.members))
        adjusted = [(fitnesses[i] - shift) / len(sp.members)
                    for i in sp.members]
        weights.append(sum(adjusted))
    slots = config.population_size - config.elites
    quotas = _allocate_quotas(weights, slots)

    offspring = []
    for sp, quota in zip(alive, quotas):
        member_fit = [fitnesses[i] for i in sp.members]
        for _ in range(quota):
            ia = proportionate_pick(sp.members, member_fit, rng)
            ib = proportionate_pick(sp.members, member_fit, rng)
            child = crossover(members[ia], members[ib],
                              fitnesses[ia], fitnesses[ib], rng)
            offspring.append(mutate(child, config, registry, rng))

    new_members = [members[i].copy() for i in elite_idx] + offspring
    carried = [Species(members[sp.members[0]].copy(), [],
                       sp.best_fitness, sp.staleness)
               for sp in alive]
    return Population(new_members, registry, carried)


# ---------------------------------------------------------------------------
# Serialization (the on-disk genome format)

def genome_to_json_dict(genome: Genome) -> dict:
    return {
        "input_arity": genome.input_arity,
        "output_arity": genome.output_arity,
        "nodes": [{"id": n.id, "role": n.role, "bias": n.bias}
                  for n in sorted(genome.nodes, key=lambda n: n.id)],
        "connections": [
            {"innovation": c.innovation, "from": c.src, "to": c.dst,
             "weight": c.weight, "enabled": c.enabled}
            for c in sorted(genome.connections, key=lambda c: c.innovation)
        ],
    }


def genome_from_json_dict(d: dict) -> Genome:
    nodes = [NodeGene(n["id"], n["role"], n["bias"]) for n in d["nodes"]]
    connections = [
        ConnectionGene(c["innovation"], c["from"], c["to"], c["weight"],
                       c["enabled"])
        for c in d["connections"]
    ]
    return Genome(d["input_arity"], d["output_arity"], nodes, connections)


def genome_to_text(genome: Genome) -> str:
    """Canonical single-line JSON; equal genomes serialize byte-identically."""
    return json.dumps(genome_to_json_dict(genome), sort_keys=True,
                      separators=(",", ":")) + "\n"


def genome_from_text(text: str) -> Genome:
    return genome_from_json_dict(json.loads(text))
