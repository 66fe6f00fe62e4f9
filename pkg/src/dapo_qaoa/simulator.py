"""Exact statevector engine for diagonal-phase / transverse-mixer circuits.

States are plain complex numpy vectors of length ``2**n``. Qubit ``k`` is the
``k``-th most significant bit of the basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Assignment, bits_to_index, index_to_bits
from .hamiltonian import DiagonalHamiltonian

MAX_QUBITS = 24


def n_qubits_of(state: np.ndarray) -> int:
    n = int(state.size).bit_length() - 1
    if state.ndim != 1 or (1 << n) != state.size:
        raise ValueError("state length is not a power of two")
    return n


def plus_state(n: int) -> np.ndarray:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count {n} outside [1, {MAX_QUBITS}]")
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)


def basis_state(x: Sequence[int]) -> np.ndarray:
    state = np.zeros(1 << len(x), dtype=complex)
    state[bits_to_index(x)] = 1.0
    return state


def _check_dims(state: np.ndarray, h: DiagonalHamiltonian) -> None:
    if state.size != 1 << h.n_qubits:
        raise ValueError(f"state has {state.size} amplitudes, Hamiltonian acts on {h.n_qubits} qubits")


def apply_phase(state: np.ndarray, h: DiagonalHamiltonian, gamma: float) -> np.ndarray:
    _check_dims(state, h)
    return state * np.exp(-1j * gamma * h.diagonal)


def apply_mixer(state: np.ndarray, beta: float) -> np.ndarray:
    """Apply ``exp(-i beta X)`` to every qubit."""
    n = n_qubits_of(state)
    c, s = np.cos(beta), -1j * np.sin(beta)
    out = np.array(state, dtype=complex)
    for k in range(n):
        view = out.reshape(1 << k, 2, -1)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = c * a0 + s * a1
        view[:, 1, :] = s * a0 + c * a1
    return out


def expectation(state: np.ndarray, h: DiagonalHamiltonian) -> float:
    _check_dims(state, h)
    probs = state.real ** 2 + state.imag ** 2
    return float(np.dot(probs, h.diagonal))


def argmax_basis(state: np.ndarray) -> Assignment:
    """Most probable basis state; ``np.argmax`` returns the first (smallest) index on ties."""
    n = n_qubits_of(state)
    probs = state.real ** 2 + state.imag ** 2
    return index_to_bits(int(np.argmax(probs)), n)


def sample_basis(state: np.ndarray, shots: int, rng: np.random.Generator) -> Assignment:
    """Most frequent outcome of ``shots`` measurements, smallest index on ties."""
    n = n_qubits_of(state)
    probs = state.real ** 2 + state.imag ** 2
    counts = np.bincount(rng.choice(probs.size, size=shots, p=probs / probs.sum()),
                         minlength=probs.size)
    return index_to_bits(int(np.argmax(counts)), n)


def run_circuit(phases: Sequence[DiagonalHamiltonian], params: Sequence[float],
                n_qubits: int | None = None) -> np.ndarray:
    """Evolve ``|+>^n`` through the layers; ``params`` is ``(g1, b1, ..., gp, bp)``."""
    if len(params) != 2 * len(phases):
        raise ValueError(f"expected {2 * len(phases)} parameters, got {len(params)}")
    if n_qubits is None:
        if not phases:
            raise ValueError("n_qubits is required for an empty schedule")
        n_qubits = phases[0].n_qubits
    state = plus_state(n_qubits)
    for k, h in enumerate(phases):
        state = apply_phase(state, h, params[2 * k])
        state = apply_mixer(state, params[2 * k + 1])
    return state


@dataclass(frozen=True)
class GateCounts:
    rzz_per_layer: tuple[int, ...]
    rx_per_layer: tuple[int, ...]
    cnot_total: int

    @property
    def rzz_total(self) -> int:
        return sum(self.rzz_per_layer)


def gate_counts(phases: Sequence[DiagonalHamiltonian]) -> GateCounts:
    """One R_ZZ per coupling (2 CNOTs each), one R_X per qubit per layer."""
    rzz = tuple(len(h.terms) for h in phases)
    rx = tuple(h.n_qubits for h in phases)
    return GateCounts(rzz, rx, 2 * sum(rzz))
