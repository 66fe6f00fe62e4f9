"""Diagonal Ising Hamiltonians for MaxCut and NAE3SAT.

A Hamiltonian is ``constant + sum(coeff * s_i * s_j)`` with spins
``s = 1 - 2 * bit``. ``sense`` says whether larger (MaxCut) or smaller
(NAE3SAT energy) diagonal values are better.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .graph import Assignment, Graph, index_to_bits

MAXIMIZE = "maximize"
MINIMIZE = "minimize"


@dataclass(frozen=True)
class QuadraticTerm:
    i: int
    j: int
    coeff: float

    def __post_init__(self):
        if not self.i < self.j:
            raise ValueError(f"term needs i < j, got ({self.i}, {self.j})")
        if self.coeff == 0:
            raise ValueError("zero coefficient")


@dataclass(frozen=True)
class DiagonalHamiltonian:
    n_qubits: int
    terms: tuple[QuadraticTerm, ...] = ()
    constant: float = 0.0
    sense: str = MAXIMIZE

    def __post_init__(self):
        if self.sense not in (MAXIMIZE, MINIMIZE):
            raise ValueError(f"unknown sense {self.sense!r}")
        pairs = [(t.i, t.j) for t in self.terms]
        if len(set(pairs)) != len(pairs):
            raise ValueError("duplicate term pairs; aggregate first")
        for t in self.terms:
            if t.j >= self.n_qubits:
                raise ValueError(f"term ({t.i}, {t.j}) out of range for {self.n_qubits} qubits")

    @classmethod
    def from_couplings(cls, n_qubits: int, couplings: Iterable[tuple[int, int, float]],
                       constant: float = 0.0, sense: str = MAXIMIZE) -> "DiagonalHamiltonian":
        """Aggregate repeated pairs and drop couplings that cancel to zero."""
        acc: dict[tuple[int, int], float] = {}
        for i, j, c in couplings:
            key = (min(i, j), max(i, j))
            acc[key] = acc.get(key, 0.0) + c
        terms = tuple(QuadraticTerm(i, j, c) for (i, j), c in sorted(acc.items()) if c != 0)
        return cls(n_qubits, terms, constant, sense)

    @property
    def sign(self) -> int:
        """+1 if larger values are better, -1 otherwise."""
        return 1 if self.sense == MAXIMIZE else -1

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((t.i, t.j) for t in self.terms)

    @cached_property
    def diagonal(self) -> np.ndarray:
        n = self.n_qubits
        z = np.arange(1 << n, dtype=np.int64)
        spins = [1 - 2 * ((z >> (n - 1 - k)) & 1) for k in range(n)]
        diag = np.full(1 << n, float(self.constant))
        for t in self.terms:
            diag += t.coeff * (spins[t.i] * spins[t.j])
        diag.setflags(write=False)
        return diag


@dataclass(frozen=True)
class Nae3SatInstance:
    n_vars: int
    # each literal is (variable, polarity) with polarity in {+1, -1}
    clauses: tuple[tuple[tuple[int, int], ...], ...] = field(default=())

    def __post_init__(self):
        for c in self.clauses:
            if len(c) != 3:
                raise ValueError(f"clause {c} does not have 3 literals")
            vs = [v for v, _ in c]
            if len(set(vs)) != 3:
                raise ValueError(f"clause {c} repeats a variable")
            for v, pol in c:
                if not 0 <= v < self.n_vars:
                    raise ValueError(f"variable {v} out of range")
                if pol not in (1, -1):
                    raise ValueError(f"bad polarity {pol}")

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        for c in self.clauses:
            lits = [str((v + 1) * pol) for v, pol in c]
            lines.append(" ".join(lits) + " 0")
        return "\n".join(lines) + "\n"


class CnfFormatError(ValueError):
    pass


def evaluate_cost(h: DiagonalHamiltonian, z: Sequence[int]) -> float:
    if len(z) != h.n_qubits:
        raise ValueError(f"assignment has {len(z)} bits, Hamiltonian has {h.n_qubits} qubits")
    s = [1 - 2 * int(b) for b in z]
    return h.constant + sum(t.coeff * s[t.i] * s[t.j] for t in h.terms)


def maxcut_hamiltonian(g: Graph) -> DiagonalHamiltonian:
    return DiagonalHamiltonian.from_couplings(
        g.n_vertices,
        ((i, j, -w / 2) for i, j, w in g.edges),
        constant=g.total_weight() / 2,
        sense=MAXIMIZE,
    )


def nae3sat_hamiltonian(inst: Nae3SatInstance) -> DiagonalHamiltonian:
    couplings = []
    for (a, pa), (b, pb), (c, pc) in inst.clauses:
        couplings += [(a, b, pa * pb), (b, c, pb * pc), (a, c, pa * pc)]
    return DiagonalHamiltonian.from_couplings(
        inst.n_vars, couplings, constant=float(len(inst.clauses)), sense=MINIMIZE
    )


def sparse_phase_from_solution(
    h_full: DiagonalHamiltonian, x: Sequence[int]
) -> tuple[DiagonalHamiltonian, bool]:
    """Keep only the couplings that pull toward ``x``.

    A term is kept when its contribution ``coeff * s_i * s_j`` at ``x`` is
    favorable for the Hamiltonian's sense (positive when maximizing, negative
    when minimizing). For MaxCut that is exactly the cut set of ``x``. The
    constant becomes the sum of ``|coeff|`` over kept terms.

    Returns ``(h, fallback)``; if nothing is kept the full Hamiltonian is
    returned with ``fallback=True``.
    """
    if len(x) != h_full.n_qubits:
        raise ValueError(f"assignment has {len(x)} bits, Hamiltonian has {h_full.n_qubits} qubits")
    s = [1 - 2 * int(b) for b in x]
    kept = tuple(t for t in h_full.terms if h_full.sign * t.coeff * s[t.i] * s[t.j] > 0)
    if not kept:
        return h_full, True
    const = sum(abs(t.coeff) for t in kept)
    return DiagonalHamiltonian(h_full.n_qubits, kept, const, h_full.sense), False


def parse_cnf(source: str) -> Nae3SatInstance:
    """Parse a DIMACS CNF subset where every clause has exactly three literals."""
    n_vars = n_clauses = None
    clauses = []
    pending: list[int] = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise CnfFormatError(f"line {lineno}: bad header {line!r}")
            n_vars, n_clauses = int(parts[2]), int(parts[3])
            continue
        if n_vars is None:
            raise CnfFormatError(f"line {lineno}: clause before 'p cnf' header")
        try:
            nums = [int(t) for t in line.split()]
        except ValueError:
            raise CnfFormatError(f"line {lineno}: malformed literal") from None
        for lit in nums:
            if lit != 0:
                pending.append(lit)
                continue
            if len(pending) != 3:
                raise CnfFormatError(f"line {lineno}: clause has {len(pending)} literals, expected 3")
            vs = [abs(v) for v in pending]
            if len(set(vs)) != 3:
                raise CnfFormatError(f"line {lineno}: repeated variable in clause {pending}")
            if max(vs) > n_vars:
                raise CnfFormatError(f"line {lineno}: variable index out of range 1..{n_vars}")
            clauses.append(tuple((abs(v) - 1, 1 if v > 0 else -1) for v in pending))
            pending = []
    if n_vars is None:
        raise CnfFormatError("missing 'p cnf' header")
    if pending:
        raise CnfFormatError("last clause not terminated by 0")
    if len(clauses) != n_clauses:
        raise CnfFormatError(f"header declares {n_clauses} clauses, found {len(clauses)}")
    return Nae3SatInstance(n_vars, tuple(clauses))


def nae_satisfied(clause, x: Sequence[int]) -> bool:
    vals = {x[v] if pol > 0 else 1 - x[v] for v, pol in clause}
    return len(vals) == 2


def plant_random_nae3sat(n_vars: int, n_clauses: int, seed: int) -> tuple[Nae3SatInstance, Assignment]:
    """Random NAE3SAT instance with a planted satisfying assignment.

    Clauses are drawn uniformly (3 distinct variables, random polarities) and
    rejected until the witness NAE-satisfies them.
    """
    if n_vars < 3:
        raise ValueError("need at least 3 variables")
    rng = random.Random(seed)
    witness = tuple(rng.randrange(2) for _ in range(n_vars))
    clauses = []
    while len(clauses) < n_clauses:
        vs = sorted(rng.sample(range(n_vars), 3))
        clause = tuple((v, rng.choice((1, -1))) for v in vs)
        if nae_satisfied(clause, witness):
            clauses.append(clause)
    return Nae3SatInstance(n_vars, tuple(clauses)), witness


def brute_force_optimum(h: DiagonalHamiltonian) -> tuple[float, Assignment]:
    """Best diagonal value for the Hamiltonian's sense; ties go to the smallest index."""
    diag = h.diagonal
    z = int(np.argmax(diag)) if h.sense == MAXIMIZE else int(np.argmin(diag))
    return float(diag[z]), index_to_bits(z, h.n_qubits)
