"""Comparison arms: fixed random/sparsified phases and clause dropout."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .driver import ConvergenceConfig, RunRecord, fixed_phase_run
from .graph import Graph, brute_force_max_cut
from .hamiltonian import Nae3SatInstance, maxcut_hamiltonian, nae3sat_hamiltonian

SPARSIFIER_METHODS = ("uniform-random", "degree-proportional", "spanning-tree-first")
_DROPOUT_RETRIES = 100


@dataclass(frozen=True)
class SparsifierSpec:
    method: str
    k: int
    seed: int = 0

    def __post_init__(self):
        if self.method not in SPARSIFIER_METHODS:
            raise ValueError(f"unknown sparsifier {self.method!r}; choose from {SPARSIFIER_METHODS}")
        if self.k < 1:
            raise ValueError("k must be positive")


@dataclass(frozen=True)
class DropoutSpec:
    rate: float = 0.5
    trials: int = 5
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.rate < 1:
            raise ValueError("dropout rate must be in (0, 1)")
        if self.trials < 1:
            raise ValueError("need at least one trial")


def _spanning_forest(g: Graph, rng: random.Random) -> list:
    # Kruskal over a random edge order
    parent = list(range(g.n_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    order = list(g.edges)
    rng.shuffle(order)
    forest = []
    for e in order:
        ri, rj = find(e[0]), find(e[1])
        if ri != rj:
            parent[ri] = rj
            forest.append(e)
    return forest


def sparsify_graph(g: Graph, spec: SparsifierSpec) -> Graph:
    """Subgraph with exactly ``spec.k`` of ``g``'s edges.

    ``degree-proportional`` draws edges without replacement with weight
    ``w * (deg_i + deg_j)``. ``spanning-tree-first`` keeps a random spanning
    forest (truncated if larger than k) and fills the rest uniformly.
    """
    k = spec.k
    if k > g.n_edges:
        raise ValueError(f"cannot keep {k} edges of a {g.n_edges}-edge graph")
    edges = list(g.edges)
    if spec.method == "uniform-random":
        kept = random.Random(spec.seed).sample(edges, k)
    elif spec.method == "degree-proportional":
        deg = g.degrees()
        weights = np.array([w * (deg[i] + deg[j]) for i, j, w in edges], dtype=float)
        rng = np.random.default_rng(spec.seed)
        idx = rng.choice(len(edges), size=k, replace=False, p=weights / weights.sum())
        kept = [edges[t] for t in idx]
    else:
        rng = random.Random(spec.seed)
        forest = _spanning_forest(g, rng)[:k]
        chosen = set(forest)
        rest = [e for e in edges if e not in chosen]
        kept = forest + rng.sample(rest, k - len(forest))
    return g.subgraph(kept)


def fixed_sparse_run(g: Graph, subgraph: Graph, p: int, cfg: ConvergenceConfig,
                     source: str = "fixed-sparse") -> list[RunRecord]:
    """All layers use ``subgraph``'s couplings; the objective is still the full cut."""
    if subgraph.n_vertices != g.n_vertices:
        raise ValueError("subgraph vertex count differs")
    full = {(i, j): w for i, j, w in g.edges}
    for i, j, w in subgraph.edges:
        if full.get((i, j)) != w:
            raise ValueError(f"subgraph edge ({i}, {j}) is not an edge of the graph")
    c_opt, _ = brute_force_max_cut(g)
    return fixed_phase_run(maxcut_hamiltonian(g), maxcut_hamiltonian(subgraph), p, cfg,
                           c_opt, source=source)


@dataclass
class DropoutOutcome:
    records: list[RunRecord]
    best_trial: int
    trial_finals: list[float]
    kept_clauses: list[int]


def dropout_instance(inst: Nae3SatInstance, rate: float, rng: random.Random) -> Nae3SatInstance:
    for _ in range(_DROPOUT_RETRIES):
        kept = tuple(c for c in inst.clauses if rng.random() >= rate)
        if kept:
            return Nae3SatInstance(inst.n_vars, kept)
    raise RuntimeError(f"every clause was dropped in {_DROPOUT_RETRIES} consecutive draws")


def dropout_run(inst: Nae3SatInstance, spec: DropoutSpec, p: int,
                cfg: ConvergenceConfig) -> DropoutOutcome:
    """Best of ``spec.trials`` runs, each with a randomly thinned phase Hamiltonian.

    Clauses are dropped whole. The cost Hamiltonian is never thinned. The
    trial with the lowest final energy wins; earlier trials win ties.
    """
    cost = nae3sat_hamiltonian(inst)
    rng = random.Random(spec.seed)
    best = None
    finals, kept_counts = [], []
    for t in range(spec.trials):
        sub = dropout_instance(inst, spec.rate, rng)
        records = fixed_phase_run(cost, nae3sat_hamiltonian(sub), p, cfg, source="dropout")
        finals.append(records[-1].best_value)
        kept_counts.append(len(sub.clauses))
        if best is None or records[-1].best_value < best[1][-1].best_value:
            best = (t, records)
    return DropoutOutcome(best[1], best[0], finals, kept_counts)
