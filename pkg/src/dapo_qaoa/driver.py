"""Layer-by-layer QAOA drivers: DAPO, vanilla and fixed-phase references.

Every driver optimizes the expectation of the full problem Hamiltonian; only
the phase Hamiltonians used inside the circuit differ between algorithms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .graph import Assignment, Graph, brute_force_max_cut, neighborhood_search
from .hamiltonian import (
    DiagonalHamiltonian,
    brute_force_optimum,
    evaluate_cost,
    maxcut_hamiltonian,
    sparse_phase_from_solution,
)
from .optimizer import OptimizerConfig, maximize
from .simulator import argmax_basis, expectation, gate_counts, run_circuit, sample_basis

FULL_PROBLEM = "full-problem"
SOLUTION_DERIVED = "solution-derived"
FALLBACK_FULL = "fallback-full"
FIXED = "fixed"

FIRST_LAYER_INIT = (0.01, 0.01)
# probes around the zero-initialized new layer; (0, 0) itself is a saddle
_ESCAPE_STEP = 0.01


@dataclass(frozen=True)
class LayerSpec:
    phase: DiagonalHamiltonian
    source: str
    derived_from: Assignment | None = None


@dataclass
class AnsatzSchedule:
    layers: list[LayerSpec] = field(default_factory=list)

    @property
    def phases(self) -> list[DiagonalHamiltonian]:
        return [layer.phase for layer in self.layers]

    def gate_counts(self):
        return gate_counts(self.phases)


@dataclass(frozen=True)
class ConvergenceConfig:
    max_layers: int = 1
    epsilon: float = 1e-4
    optimizer: OptimizerConfig = OptimizerConfig()
    shots: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.max_layers < 1:
            raise ValueError("max_layers must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")


@dataclass
class RunRecord:
    layer: int
    best_value: float
    ratio: float | None
    x_measured: Assignment
    x_after_search: Assignment
    search_delta: float
    rzz_this_layer: int
    rzz_cumulative: int
    params: list[float]
    fallback_used: bool = False
    source: str = FULL_PROBLEM
    phase: DiagonalHamiltonian | None = field(default=None, repr=False, compare=False)


def approximation_ratio(value: float, c_opt: float) -> float:
    if c_opt <= 0:
        raise ValueError(f"approximation ratio needs a positive optimum, got {c_opt}")
    return value / c_opt


def _ratio_or_none(value: float, c_opt: float | None) -> float | None:
    if c_opt is None or c_opt == 0:
        return None
    return value / c_opt


def schedule_from_records(records: Sequence[RunRecord]) -> AnsatzSchedule:
    return AnsatzSchedule([LayerSpec(r.phase, r.source) for r in records])


def _signed_objective(cost: DiagonalHamiltonian, phases: list[DiagonalHamiltonian]) -> Callable:
    sign = cost.sign
    n = cost.n_qubits

    def f(theta):
        return sign * expectation(run_circuit(phases, theta, n), cost)

    return f


def _warm_start(f: Callable, prev: Sequence[float]) -> list[float]:
    """Append a new (gamma, beta) pair to ``prev``.

    The pair (0, 0) reproduces the previous optimum exactly but is a saddle:
    with the new gamma at zero the new mixer merges with the previous one.
    The escape directions move the new pair to ``(a, b)`` while taking ``b``
    off the previous beta. The best of (0, 0) and the four ``|a| = |b| = 0.01``
    probes is returned, (0, 0) winning ties.
    """
    h = _ESCAPE_STEP
    base = list(prev) + [0.0, 0.0]
    best, best_val = base, f(np.asarray(base))
    for a, b in itertools.product((h, -h), repeat=2):
        theta = list(prev[:-1]) + [prev[-1] - b, a, b]
        v = f(np.asarray(theta))
        if v > best_val:
            best, best_val = theta, v
    return best


def _measure(state: np.ndarray, cfg: ConvergenceConfig, depth: int) -> Assignment:
    if cfg.shots:
        rng = np.random.default_rng([cfg.seed, depth])
        return sample_basis(state, cfg.shots, rng)
    return argmax_basis(state)


def _optimize_depth(cost, phases, prev_params, cfg: ConvergenceConfig):
    f = _signed_objective(cost, phases)
    theta0 = list(FIRST_LAYER_INIT) if not prev_params else _warm_start(f, prev_params)
    res = maximize(f, theta0, cfg.optimizer)
    state = run_circuit(phases, res.best_params, cost.n_qubits)
    return cost.sign * res.best_value, res.best_params, state


def _search_objective(cost: DiagonalHamiltonian):
    return lambda y: cost.sign * evaluate_cost(cost, y)


def dapo_run(cost: DiagonalHamiltonian, cfg: ConvergenceConfig,
             c_opt: float | None = None) -> list[RunRecord]:
    """Build the ansatz one layer at a time from the previous layer's best solution.

    Layer 1 uses the full problem Hamiltonian. After optimizing depth ``d`` the
    most probable basis state is refined by one 1-flip neighborhood scan and
    layer ``d + 1`` uses the couplings that favor the refined solution. All
    ``2d`` angles are re-optimized at each depth. Stops at ``max_layers`` or
    when the optimum changes by less than ``epsilon``.
    """
    if not cost.terms:
        raise ValueError("problem Hamiltonian has no couplings")
    objective = _search_objective(cost)
    layers = [LayerSpec(cost, FULL_PROBLEM)]
    fallback = False
    records: list[RunRecord] = []
    params: list[float] = []
    prev_value = None
    rzz_cum = 0
    for depth in range(1, cfg.max_layers + 1):
        phases = [layer.phase for layer in layers]
        value, params, state = _optimize_depth(cost, phases, params, cfg)
        x = _measure(state, cfg, depth)
        x_search, delta = neighborhood_search(objective, x)
        rzz = len(layers[-1].phase.terms)
        rzz_cum += rzz
        records.append(RunRecord(
            layer=depth, best_value=value, ratio=_ratio_or_none(value, c_opt),
            x_measured=x, x_after_search=x_search, search_delta=delta,
            rzz_this_layer=rzz, rzz_cumulative=rzz_cum, params=list(params),
            fallback_used=fallback, source=layers[-1].source, phase=layers[-1].phase,
        ))
        if depth == cfg.max_layers:
            break
        if prev_value is not None and abs(value - prev_value) < cfg.epsilon:
            break
        prev_value = value
        phase, fallback = sparse_phase_from_solution(cost, x_search)
        layers.append(LayerSpec(phase, FALLBACK_FULL if fallback else SOLUTION_DERIVED, x_search))
    return records


def fixed_phase_run(cost: DiagonalHamiltonian, phase: DiagonalHamiltonian, p: int,
                    cfg: ConvergenceConfig, c_opt: float | None = None,
                    source: str = FIXED) -> list[RunRecord]:
    """Every layer uses ``phase``; depths 1..p are optimized with warm starts."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if phase.n_qubits != cost.n_qubits:
        raise ValueError("phase and cost act on different qubit counts")
    records: list[RunRecord] = []
    params: list[float] = []
    rzz = len(phase.terms)
    for depth in range(1, p + 1):
        value, params, state = _optimize_depth(cost, [phase] * depth, params, cfg)
        x = _measure(state, cfg, depth)
        records.append(RunRecord(
            layer=depth, best_value=value, ratio=_ratio_or_none(value, c_opt),
            x_measured=x, x_after_search=x, search_delta=0.0,
            rzz_this_layer=rzz, rzz_cumulative=rzz * depth, params=list(params),
            source=source, phase=phase,
        ))
    return records


def vanilla_run(cost: DiagonalHamiltonian, p: int, cfg: ConvergenceConfig,
                c_opt: float | None = None) -> list[RunRecord]:
    return fixed_phase_run(cost, cost, p, cfg, c_opt, source=FULL_PROBLEM)


def optimal_phase_run(problem: Graph | DiagonalHamiltonian, p: int,
                      cfg: ConvergenceConfig) -> list[RunRecord]:
    """Every layer's phase is built from an exact optimum found by enumeration."""
    if isinstance(problem, Graph):
        cost = maxcut_hamiltonian(problem)
        c_opt, x_opt = brute_force_max_cut(problem)
    else:
        cost = problem
        c_opt, x_opt = brute_force_optimum(cost)
    phase, fallback = sparse_phase_from_solution(cost, x_opt)
    records = fixed_phase_run(cost, phase, p, cfg, c_opt, source=SOLUTION_DERIVED)
    for r in records:
        r.fallback_used = fallback
    return records


def rzz_savings(dapo: Sequence[RunRecord], vanilla: Sequence[RunRecord]) -> list[dict]:
    """Per-depth cumulative R_ZZ reduction and ratio of DAPO against vanilla."""
    if len(dapo) != len(vanilla):
        raise ValueError(f"depth mismatch: {len(dapo)} DAPO vs {len(vanilla)} vanilla records")
    rows = []
    for d, v in zip(dapo, vanilla):
        rows.append({
            "p": d.layer,
            "vanilla_cumulative": v.rzz_cumulative,
            "dapo_cumulative": d.rzz_cumulative,
            "reduction": v.rzz_cumulative - d.rzz_cumulative,
            "ratio": d.rzz_cumulative / v.rzz_cumulative if v.rzz_cumulative else 1.0,
            "cnot_reduction": 2 * (v.rzz_cumulative - d.rzz_cumulative),
        })
    return rows
