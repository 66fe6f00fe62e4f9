"""Acceptance criteria 1-10, each at its stated tolerance and runtime budget.

Every test prints one ``criterion N PASS|FAIL`` line (run with ``-s`` to see
them inline; they are also repeated in the terminal summary).
"""

import itertools
import math
import random
import statistics
import time

import networkx as nx
import numpy as np
import pytest

from dapo_qaoa.baselines import DropoutSpec, SparsifierSpec, dropout_run, fixed_sparse_run, sparsify_graph
from dapo_qaoa.cli import main
from dapo_qaoa.driver import ConvergenceConfig, dapo_run, optimal_phase_run, rzz_savings, vanilla_run
from dapo_qaoa.experiment import maxcut_with_target, random_graph as gnm
from dapo_qaoa.graph import Graph, brute_force_max_cut, cut_value, neighborhood, neighborhood_search
from dapo_qaoa.hamiltonian import maxcut_hamiltonian, nae3sat_hamiltonian, plant_random_nae3sat
from dapo_qaoa.optimizer import OptimizerConfig, maximize
from dapo_qaoa.records import derive_seed
from dapo_qaoa.simulator import apply_mixer, apply_phase, basis_state, expectation, plus_state, run_circuit

from conftest import ACCEPTANCE_LINES, all_assignments, naive_cut, random_graph


def verdict(number, ok, detail):
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


# 1 -------------------------------------------------------------------------

def test_criterion_01_hamiltonian_cost_equivalence():
    worst = 0.0
    with Clock() as clk:
        for seed in range(50):
            rng = random.Random(seed)
            n = rng.randint(2, 8)
            g = random_graph(n, rng.uniform(0.2, 0.9), seed, weighted=seed % 3 == 0)
            h = maxcut_hamiltonian(g)
            for x in all_assignments(n):
                worst = max(worst, abs(expectation(basis_state(x), h) - naive_cut(g.edges, x)))
    ok = worst <= 1e-9 and clk.seconds < 10
    verdict(1, ok, f"max |<z|H|z> - cut| = {worst:.2e} over 50 graphs, {clk.seconds:.1f}s")
    assert ok


# 2 -------------------------------------------------------------------------

def test_criterion_02_nae3sat_energy_oracle():
    worst, witness_energies = 0.0, []
    with Clock() as clk:
        for seed in range(20):
            n = 5 + seed % 4
            inst, witness = plant_random_nae3sat(n, 2 * n + seed % 5, seed)
            diag = nae3sat_hamiltonian(inst).diagonal
            for z, x in enumerate(all_assignments(n)):
                violated = sum(len({bool(x[v]) == (pol > 0) for v, pol in c}) == 1 for c in inst.clauses)
                worst = max(worst, abs(diag[z] - 4 * violated))
            witness_energies.append(expectation(basis_state(witness), nae3sat_hamiltonian(inst)))
    ok = worst <= 1e-9 and all(e == 0 for e in witness_energies) and clk.seconds < 10
    verdict(2, ok, f"max |E - 4*violated| = {worst:.2e}, witness energies all 0: "
                   f"{all(e == 0 for e in witness_energies)}, {clk.seconds:.1f}s")
    assert ok


# 3 -------------------------------------------------------------------------

def _oracle_search(f, x):
    # argmax over [x, flip bit 0, flip bit 1, ...]; the first maximum wins,
    # so x survives unless something strictly beats it
    cands = [tuple(x)] + [tuple(b ^ (k == i) for k, b in enumerate(x)) for i in range(len(x))]
    vals = [f(c) for c in cands]
    best = max(range(len(cands)), key=lambda t: (vals[t], -t))
    return cands[best], vals[best] - vals[0]


def _small_graphs():
    # every labelled graph on <= 4 vertices, plus every isomorphism class on 5 and 6
    for n in range(1, 5):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            yield Graph.from_edges(n, [p for k, p in enumerate(pairs) if mask >> k & 1])
    for a in nx.graph_atlas_g():
        if a.number_of_nodes() in (5, 6):
            yield Graph.from_edges(a.number_of_nodes(), sorted(tuple(sorted(e)) for e in a.edges))


def test_criterion_03_neighborhood_search():
    example = ["".join(map(str, y)) for y in neighborhood((1, 0, 1, 0, 1))]
    mismatches, checked = 0, 0
    with Clock() as clk:
        for g in _small_graphs():
            table = {x: naive_cut(g.edges, x) for x in all_assignments(g.n_vertices)}
            for x in table:
                checked += 1
                if neighborhood_search(table.__getitem__, x) != _oracle_search(table.__getitem__, x):
                    mismatches += 1
    ok = (example == ["00101", "11101", "10001", "10111", "10100"]
          and mismatches == 0 and clk.seconds < 5)
    verdict(3, ok, f"{checked} (graph, start) pairs, {mismatches} mismatches; "
                   f"10101 -> {example}; {clk.seconds:.1f}s")
    assert ok


# 4 -------------------------------------------------------------------------

def test_criterion_04_simulator_fidelity():
    rng = np.random.default_rng(2024)
    worst_norm = 0.0
    with Clock() as clk:
        hams = [maxcut_hamiltonian(random_graph(6, 0.5, s, weighted=True)) for s in range(20)]
        for _ in range(1000):
            st = plus_state(6)
            for _ in range(int(rng.integers(1, 9))):
                h = hams[int(rng.integers(len(hams)))]
                st = apply_mixer(apply_phase(st, h, rng.uniform(-math.pi, math.pi)),
                                 rng.uniform(-math.pi, math.pi))
            worst_norm = max(worst_norm, abs(np.linalg.norm(st) - 1))

        k3 = maxcut_hamiltonian(Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)]))
        axis = np.arange(200) * math.pi / 200
        grid = max(expectation(run_circuit([k3], [a, b]), k3) for a in axis for b in axis)
        opt = maximize(lambda t: expectation(run_circuit([k3], t), k3), [0.01, 0.01],
                       OptimizerConfig()).best_value

        worst_mix = 0.0
        for n in (1, 3, 6):
            for beta in rng.uniform(-math.pi, math.pi, size=10):
                v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
                v /= np.linalg.norm(v)
                worst_mix = max(worst_mix, np.max(np.abs(
                    apply_mixer(apply_mixer(v, beta), beta) - apply_mixer(v, 2 * beta))))
    ok = worst_norm <= 1e-9 and abs(opt - grid) <= 1e-3 and worst_mix <= 1e-9 and clk.seconds < 30
    verdict(4, ok, f"norm drift {worst_norm:.2e}; K3 p=1 opt {opt:.6f} vs grid {grid:.6f}; "
                   f"mixer additivity {worst_mix:.2e}; {clk.seconds:.1f}s")
    assert ok


# 5 -------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_05_rzz_counting():
    with Clock() as clk:
        g, seed, (c_opt, _) = maxcut_with_target(10, 30, 0, 20)
        h = maxcut_hamiltonian(g)
        cfg = ConvergenceConfig(max_layers=12, epsilon=0.0)
        dapo = dapo_run(h, cfg, c_opt)
        vanilla = vanilla_run(h, 12, cfg, c_opt)
        savings = rzz_savings(dapo, vanilla)
    per_layer = [r.rzz_this_layer for r in dapo]
    ratio = savings[-1]["ratio"]
    ok = (len(dapo) == 12 and c_opt == 20 and all(r <= 20 for r in per_layer[1:])
          and ratio <= 0.70 and clk.seconds < 600)
    verdict(5, ok, f"graph seed {seed}, C_opt {c_opt}; DAPO R_ZZ per layer {per_layer}; "
                   f"cumulative {savings[-1]['dapo_cumulative']}/{savings[-1]['vanilla_cumulative']}"
                   f" = {ratio:.4f}; final ratios DAPO {dapo[-1].ratio:.4f} "
                   f"vanilla {vanilla[-1].ratio:.4f}; {clk.seconds:.0f}s")
    assert ok


# 6 -------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_06_monotone_in_depth():
    cfg = ConvergenceConfig(max_layers=8, epsilon=0.0)
    runs = {}
    with Clock() as clk:
        h = maxcut_hamiltonian(gnm(10, 25, 3))
        runs["maxcut/dapo"] = (dapo_run(h, cfg), 1)
        runs["maxcut/vanilla"] = (vanilla_run(h, 8, cfg), 1)
        inst, _ = plant_random_nae3sat(9, 27, 3)
        hn = nae3sat_hamiltonian(inst)
        runs["nae3sat/dapo"] = (dapo_run(hn, cfg), -1)
        runs["nae3sat/vanilla"] = (vanilla_run(hn, 8, cfg), -1)
    worst = min(sign * (b.best_value - a.best_value)
                for recs, sign in runs.values() for a, b in zip(recs, recs[1:]))
    ok = worst >= -1e-9 and all(len(r) == 8 for r, _ in runs.values()) and clk.seconds < 600
    verdict(6, ok, f"smallest sense-adjusted step F_d - F_(d-1) = {worst:.3e} over "
                   f"{len(runs)} runs to p=8; {clk.seconds:.0f}s")
    assert ok


# 7 -------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_07_three_algorithm_trend():
    cfg = ConvergenceConfig(max_layers=6, epsilon=0.0)
    lines, ok = [], True
    with Clock() as clk:
        for m in (30, 33, 35):
            ratios = {"dapo": [], "vanilla": [], "optimal-phase": []}
            for seed in range(5):
                g = gnm(10, m, seed)
                h = maxcut_hamiltonian(g)
                c_opt, _ = brute_force_max_cut(g)
                ratios["dapo"].append(dapo_run(h, cfg, c_opt)[-1].ratio)
                ratios["vanilla"].append(vanilla_run(h, 6, cfg, c_opt)[-1].ratio)
                ratios["optimal-phase"].append(optimal_phase_run(g, 6, cfg)[-1].ratio)
            mean = {k: statistics.mean(v) for k, v in ratios.items()}
            ok &= mean["optimal-phase"] >= mean["dapo"] - 0.02
            ok &= mean["dapo"] >= mean["vanilla"] - 0.01
            raw = "; ".join(f"{k} {[round(v, 4) for v in vs]}" for k, vs in ratios.items())
            lines.append(f"m={m}: mean opt {mean['optimal-phase']:.4f} dapo {mean['dapo']:.4f} "
                         f"vanilla {mean['vanilla']:.4f} (raw {raw})")
    ok &= clk.seconds < 3600
    verdict(7, ok, " | ".join(lines) + f"; {clk.seconds:.0f}s")
    assert ok


# 8 -------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_08_random_sparse_vs_optimal_phase():
    cfg = ConvergenceConfig(max_layers=6, epsilon=0.0)
    with Clock() as clk:
        g, _, (c_opt, _) = maxcut_with_target(10, 30, 0, 20)
        opt = optimal_phase_run(g, 6, cfg)[-1].ratio
        randoms = []
        for k in range(10):
            spec = SparsifierSpec("uniform-random", int(c_opt), derive_seed(0, "random-sparse", k))
            randoms.append(fixed_sparse_run(g, sparsify_graph(g, spec), 6, cfg)[-1].ratio)
    ok = statistics.mean(randoms) <= opt and clk.seconds < 1800
    verdict(8, ok, f"mean random-sparse ratio {statistics.mean(randoms):.4f} "
                   f"(raw {[round(r, 4) for r in randoms]}) vs optimal-phase {opt:.4f}; "
                   f"{clk.seconds:.0f}s")
    assert ok


# 9 -------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_09_nae3sat_dapo_vs_dropout():
    cfg = ConvergenceConfig(max_layers=9, epsilon=0.0)
    pairs = []
    with Clock() as clk:
        for seed in range(5):
            inst, _ = plant_random_nae3sat(10, 30, seed)
            d = dapo_run(nae3sat_hamiltonian(inst), cfg)[-1].best_value
            drop = dropout_run(inst, DropoutSpec(rate=0.5, trials=5, seed=seed), 9, cfg)
            pairs.append((d, drop.records[-1].best_value))
    wins = sum(d <= b for d, b in pairs)
    ok = wins > len(pairs) / 2 and clk.seconds < 3600
    verdict(9, ok, f"DAPO <= dropout best-of-5 on {wins}/{len(pairs)} instances; "
                   f"(dapo, dropout) = {[(round(a, 4), round(b, 4)) for a, b in pairs]}; "
                   f"{clk.seconds:.0f}s")
    assert ok


# 10 ------------------------------------------------------------------------

def test_criterion_10_byte_identical_reruns(tmp_path):
    inst = tmp_path / "inst"
    assert main(["gen", "maxcut", "--n", "6", "--m", "9", "--seed", "4", "--out", str(inst)]) == 0
    assert main(["gen", "nae3sat", "--vars", "6", "--clauses", "10", "--seed", "4",
                 "--out", str(inst)]) == 0
    [graph] = inst.glob("*.txt")
    [cnf] = inst.glob("*.cnf")
    runs = {
        "maxcut": ["--problem", "maxcut", "--instance", str(graph),
                   "--algorithms", "dapo,vanilla,optimal-phase,random-sparse,sparsifier"],
        "nae3sat": ["--problem", "nae3sat", "--instance", str(cnf),
                    "--algorithms", "dapo,vanilla,optimal-phase,dropout"],
    }
    identical = {}
    for name, argv in runs.items():
        blobs = []
        for rep in range(2):
            out = tmp_path / f"{name}{rep}"
            assert main(["run", *argv, "--p-max", "3", "--max-evals", "200",
                         "--seed", "11", "--out", str(out)]) == 0
            blobs.append((out / "records.csv").read_bytes())
        identical[name] = blobs[0] == blobs[1] and len(blobs[0]) > 0
    ok = all(identical.values())
    verdict(10, ok, f"repeated runs byte-identical: {identical}")
    assert ok
