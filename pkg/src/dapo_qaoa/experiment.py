"""Experiment orchestration: instance generation and seeded algorithm sweeps."""

from __future__ import annotations

import json
import platform
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import (
    SPARSIFIER_METHODS,
    DropoutSpec,
    SparsifierSpec,
    dropout_run,
    fixed_sparse_run,
    sparsify_graph,
)
from .driver import ConvergenceConfig, dapo_run, optimal_phase_run, vanilla_run
from .graph import Graph, bits_to_str, brute_force_max_cut, parse_graph
from .hamiltonian import (
    brute_force_optimum,
    evaluate_cost,
    maxcut_hamiltonian,
    nae3sat_hamiltonian,
    parse_cnf,
    plant_random_nae3sat,
)
from .optimizer import OptimizerConfig
from .records import derive_seed, record_row, sidecar_entry, write_records

MAXCUT_ALGORITHMS = ("dapo", "vanilla", "optimal-phase", "random-sparse", "sparsifier")
NAE3SAT_ALGORITHMS = ("dapo", "vanilla", "optimal-phase", "dropout")
_TARGET_ATTEMPTS = 10_000


class ExperimentError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    problem: str
    instances: list[str] = field(default_factory=list)
    algorithms: list[str] = field(default_factory=lambda: ["dapo", "vanilla"])
    p_min: int = 1
    p_max: int = 6
    optimizer: dict = field(default_factory=dict)
    out: str = "runs"
    seed: int = 0
    # 0 runs every depth up to p_max so depth sweeps are complete
    epsilon: float = 0.0
    random_trials: int = 10
    dropout_rate: float = 0.5
    dropout_trials: int = 5
    threads: int = 1
    generate: dict | None = None

    def __post_init__(self):
        if self.problem not in ("maxcut", "nae3sat"):
            raise ValueError(f"unknown problem {self.problem!r}")
        if not self.algorithms:
            raise ValueError("algorithms must be nonempty")
        allowed = MAXCUT_ALGORITHMS if self.problem == "maxcut" else NAE3SAT_ALGORITHMS
        for a in self.algorithms:
            if a not in allowed:
                raise ValueError(f"algorithm {a!r} not available for {self.problem}; choose from {allowed}")
        if not 1 <= self.p_min <= self.p_max:
            raise ValueError("need 1 <= p_min <= p_max")
        if not self.instances and not self.generate:
            raise ValueError("no instances given")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls(**json.loads(text))


# ---------------------------------------------------------------- generation

def random_graph(n: int, m: int, seed: int) -> Graph:
    if m > n * (n - 1) // 2:
        raise ValueError(f"{m} edges exceed the {n * (n - 1) // 2} possible on {n} vertices")
    rng = random.Random(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return Graph.from_edges(n, sorted(rng.sample(pairs, m)))


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def maxcut_with_target(n: int, m: int, seed: int, target: float | None):
    """Random G(n, m); with ``target`` set, derived seeds are tried until the optimum matches."""
    if target is None:
        g = random_graph(n, m, seed)
        return g, seed, brute_force_max_cut(g)
    for k in range(_TARGET_ATTEMPTS):
        s = seed if k == 0 else derive_seed(seed, "target-opt", k)
        g = random_graph(n, m, s)
        c_opt, x_opt = brute_force_max_cut(g)
        if c_opt == target:
            return g, s, (c_opt, x_opt)
    raise ExperimentError(f"no ({n}, {m}) graph with optimum {target} in {_TARGET_ATTEMPTS} tries")


def gen_maxcut(out: Path, n: int, m: int | None, seed: int, complete: bool = False,
               target: float | None = None) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    if complete:
        g, used_seed = complete_graph(n), None
        c_opt, x_opt = brute_force_max_cut(g)
        stem = f"maxcut_K{n}"
    else:
        if m is None:
            raise ValueError("--m is required unless --complete")
        g, used_seed, (c_opt, x_opt) = maxcut_with_target(n, m, seed, target)
        stem = f"maxcut_n{n}_m{m}_s{seed}"
    path = out / f"{stem}.txt"
    path.write_text(g.to_text(), encoding="ascii")
    manifest = {"problem": "maxcut", "file": path.name, "n": n, "m": g.n_edges,
                "seed": used_seed, "c_opt": c_opt, "x_opt": bits_to_str(x_opt)}
    path.with_suffix(".json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="ascii")
    return path


def gen_nae3sat(out: Path, n_vars: int, n_clauses: int, seed: int) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    inst, witness = plant_random_nae3sat(n_vars, n_clauses, seed)
    h = nae3sat_hamiltonian(inst)
    e_min, _ = brute_force_optimum(h)
    path = out / f"nae3sat_v{n_vars}_c{n_clauses}_s{seed}.cnf"
    path.write_text(f"c planted NAE3SAT seed={seed}\n" + inst.to_dimacs(), encoding="ascii")
    manifest = {"problem": "nae3sat", "file": path.name, "vars": n_vars, "clauses": n_clauses,
                "seed": seed, "witness": bits_to_str(witness),
                "witness_energy": evaluate_cost(h, witness), "min_energy": e_min}
    path.with_suffix(".json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="ascii")
    return path


# ---------------------------------------------------------------- runs

def _conv(cfg: ExperimentConfig, role: str) -> ConvergenceConfig:
    opt = dict(cfg.optimizer)
    opt["seed"] = derive_seed(cfg.seed, "optimizer:" + role)
    return ConvergenceConfig(max_layers=cfg.p_max, epsilon=cfg.epsilon,
                             optimizer=OptimizerConfig(**opt), seed=derive_seed(cfg.seed, "measure:" + role))


def _cells(cfg: ExperimentConfig) -> list[tuple]:
    cells = []
    for path in cfg.instances:
        for algo in cfg.algorithms:
            if algo == "random-sparse":
                cells += [(algo, path, k) for k in range(cfg.random_trials)]
            elif algo == "sparsifier":
                cells += [(f"sparsifier:{m}", path, 0) for m in SPARSIFIER_METHODS]
            else:
                cells.append((algo, path, 0))
    return cells


def run_cell(cfg: ExperimentConfig, algo: str, path: str, index: int):
    """One (algorithm, instance, trial) cell; returns ``(csv rows, sidecar entries)``."""
    name = Path(path).stem
    role = f"{algo}:{name}:{index}"
    conv = _conv(cfg, role)
    text = Path(path).read_text(encoding="ascii")
    seed = cfg.seed
    if cfg.problem == "maxcut":
        g = parse_graph(text)
        cost = maxcut_hamiltonian(g)
        c_opt, _ = brute_force_max_cut(g)
        if algo == "dapo":
            records = dapo_run(cost, conv, c_opt)
        elif algo == "vanilla":
            records = vanilla_run(cost, cfg.p_max, conv, c_opt)
        elif algo == "optimal-phase":
            records = optimal_phase_run(g, cfg.p_max, conv)
        else:
            method = "uniform-random" if algo == "random-sparse" else algo.split(":", 1)[1]
            seed = derive_seed(cfg.seed, f"sparsifier:{method}:{name}", index)
            sub = sparsify_graph(g, SparsifierSpec(method, int(c_opt), seed))
            records = fixed_sparse_run(g, sub, cfg.p_max, conv, source=algo)
    else:
        inst = parse_cnf(text)
        cost = nae3sat_hamiltonian(inst)
        if algo == "dapo":
            records = dapo_run(cost, conv)
        elif algo == "vanilla":
            records = vanilla_run(cost, cfg.p_max, conv)
        elif algo == "optimal-phase":
            records = optimal_phase_run(cost, cfg.p_max, conv)
        else:
            seed = derive_seed(cfg.seed, f"dropout:{name}", index)
            spec = DropoutSpec(cfg.dropout_rate, cfg.dropout_trials, seed)
            records = dropout_run(inst, spec, cfg.p_max, conv).records
    kept = [r for r in records if r.layer >= cfg.p_min]
    rows = [record_row(algo, name, seed, r) for r in kept]
    side = [sidecar_entry(algo, name, seed, r) for r in kept]
    return rows, side


def _run_cell_star(args):
    return run_cell(*args)


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Run every cell, write ``records.csv`` (+ JSON sidecar) and ``run.json``."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.generate:
        cfg.instances = list(cfg.instances) + [str(p) for p in _generate_from_config(cfg, out)]
    for path in cfg.instances:
        if not Path(path).is_file():
            raise FileNotFoundError(f"instance file not found: {path}")
    cells = _cells(cfg)
    jobs = [(cfg, a, p, k) for a, p, k in cells]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_run_cell_star, jobs))
    else:
        results = [_run_cell_star(j) for j in jobs]
    rows = [r for res in results for r in res[0]]
    side = [e for res in results for e in res[1]]
    csv_path = out / "records.csv"
    write_records(csv_path, rows, side)
    meta = {
        "config": asdict(cfg),
        "versions": {"dapo_qaoa": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        "seeds": {f"{a}:{Path(p).stem}:{k}": derive_seed(cfg.seed, f"optimizer:{a}:{Path(p).stem}:{k}")
                  for a, p, k in cells},
        "seed_derivation": "blake2b-64(f'{master}|{role}|{index}') & (2**63 - 1)",
    }
    (out / "run.json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return csv_path


def _generate_from_config(cfg: ExperimentConfig, out: Path) -> list[Path]:
    gen = dict(cfg.generate)
    count = int(gen.pop("count", 1))
    inst_dir = out / "instances"
    paths = []
    for k in range(count):
        seed = derive_seed(cfg.seed, "generator", k)
        if cfg.problem == "maxcut":
            paths.append(gen_maxcut(inst_dir, gen["n"], gen.get("m"), seed,
                                    gen.get("complete", False), gen.get("target_opt")))
        else:
            paths.append(gen_nae3sat(inst_dir, gen["vars"], gen["clauses"], seed))
    return paths

