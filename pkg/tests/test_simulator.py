import math

import numpy as np
import pytest
from scipy.linalg import expm

from dapo_qaoa.experiment import random_graph as gnm
from dapo_qaoa.graph import Graph, index_to_bits
from dapo_qaoa.hamiltonian import DiagonalHamiltonian, evaluate_cost, maxcut_hamiltonian
from dapo_qaoa.simulator import (
    apply_mixer,
    apply_phase,
    argmax_basis,
    basis_state,
    expectation,
    gate_counts,
    plus_state,
    run_circuit,
    sample_basis,
)

from conftest import random_graph

X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def dense_mixer(n, beta):
    # independent route: exponentiate the full sum of X_i
    total = np.zeros((1 << n, 1 << n), dtype=complex)
    for k in range(n):
        op = np.ones((1, 1), dtype=complex)
        for q in range(n):
            op = np.kron(op, X if q == k else I2)
        total += op
    return expm(-1j * beta * total)


def naive_expectation(state, h):
    n = h.n_qubits
    return sum(abs(state[z]) ** 2 * evaluate_cost(h, index_to_bits(z, n)) for z in range(1 << n))


def random_state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def test_plus_state():
    assert np.allclose(plus_state(1), [2 ** -0.5] * 2)
    assert np.allclose(plus_state(3), [8 ** -0.5] * 8)
    for n in (1, 4, 9):
        assert np.linalg.norm(plus_state(n)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        plus_state(0)
    with pytest.raises(ValueError):
        plus_state(25)


def test_phase_identity_and_probabilities(k3):
    h = maxcut_hamiltonian(k3)
    rng = np.random.default_rng(1)
    st = random_state(3, rng)
    assert np.array_equal(apply_phase(st, h, 0.0), st)
    out = apply_phase(st, h, 0.77)
    assert np.allclose(np.abs(out), np.abs(st), atol=1e-14)


def test_phase_constant_only_is_global_phase():
    h = DiagonalHamiltonian(3, (), 2.0)
    st = random_state(3, np.random.default_rng(2))
    out = apply_phase(st, h, 0.3)
    assert np.allclose(out, np.exp(-0.6j) * st)


def test_phase_dimension_mismatch(k3):
    with pytest.raises(ValueError):
        apply_phase(plus_state(4), maxcut_hamiltonian(k3), 0.1)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
@pytest.mark.parametrize("beta", [0.0, 0.3, -1.1, math.pi / 2])
def test_mixer_matches_dense_exponential(n, beta):
    st = random_state(n, np.random.default_rng(n))
    assert np.allclose(apply_mixer(st, beta), dense_mixer(n, beta) @ st, atol=1e-12)


def test_mixer_special_angles():
    st = basis_state((0, 1, 1))
    out = apply_mixer(st, math.pi / 2)
    expected = basis_state((1, 0, 0)) * (-1j) ** 3
    assert np.allclose(out, expected, atol=1e-15)
    probs = np.abs(apply_mixer(basis_state((0,)), math.pi / 4)) ** 2
    assert np.allclose(probs, [0.5, 0.5])


def test_mixer_additivity():
    rng = np.random.default_rng(3)
    for n in (1, 4):
        st = random_state(n, rng)
        twice = apply_mixer(apply_mixer(st, 0.41), 0.41)
        assert np.max(np.abs(twice - apply_mixer(st, 0.82))) <= 1e-9


def test_expectation_examples(k3):
    h = maxcut_hamiltonian(k3)
    assert expectation(plus_state(3), h) == pytest.approx(1.5, abs=1e-12)
    assert expectation(basis_state((0, 1, 0)), h) == pytest.approx(2.0)
    g = random_graph(8, 0.5, 5)
    assert expectation(plus_state(8), maxcut_hamiltonian(g)) == pytest.approx(g.n_edges / 2, abs=1e-12)


@pytest.mark.parametrize("n", [2, 6, 10])
def test_expectation_matches_naive_sum(n):
    rng = np.random.default_rng(n)
    g = random_graph(n, 0.5, n, weighted=True)
    h = maxcut_hamiltonian(g)
    st = random_state(n, rng)
    assert abs(expectation(st, h) - naive_expectation(st, h)) <= 1e-9


def test_phase_leaves_diagonal_expectation_unchanged():
    g = random_graph(5, 0.6, 8)
    h = maxcut_hamiltonian(g)
    st = random_state(5, np.random.default_rng(8))
    assert expectation(apply_phase(st, h, 1.3), h) == pytest.approx(expectation(st, h), abs=1e-12)


def test_argmax_basis():
    assert argmax_basis(plus_state(4)) == (0, 0, 0, 0)
    assert argmax_basis(basis_state((1, 1, 0))) == (1, 1, 0)
    st = np.full(8, math.sqrt(0.1 / 7), dtype=complex)
    st[5] = math.sqrt(0.9)
    assert argmax_basis(st) == (1, 0, 1)


def test_sample_basis_is_seeded():
    st = np.zeros(8, dtype=complex)
    st[5], st[2] = math.sqrt(0.8), math.sqrt(0.2)
    a = sample_basis(st, 200, np.random.default_rng(1))
    b = sample_basis(st, 200, np.random.default_rng(1))
    assert a == b == (1, 0, 1)


def test_run_circuit_trivial_cases(k3):
    h = maxcut_hamiltonian(k3)
    assert np.allclose(run_circuit([], [], 3), plus_state(3))
    assert np.allclose(run_circuit([h, h], [0, 0, 0, 0]), plus_state(3))
    with pytest.raises(ValueError):
        run_circuit([h], [0.1])


def test_run_circuit_matches_dense_product(k3):
    h = maxcut_hamiltonian(k3)
    params = [0.3, 0.2, -0.5, 0.9]
    st = plus_state(3)
    for k in range(2):
        st = dense_mixer(3, params[2 * k + 1]) @ (np.exp(-1j * params[2 * k] * h.diagonal) * st)
    assert np.allclose(run_circuit([h, h], params), st, atol=1e-12)


def test_zero_params_give_uniform_average():
    g = random_graph(6, 0.5, 1)
    h = maxcut_hamiltonian(g)
    sub = maxcut_hamiltonian(Graph.from_edges(6, g.edges[:3]))
    st = run_circuit([h, sub, h], [0.0] * 6)
    assert expectation(st, h) == pytest.approx(h.diagonal.mean(), abs=1e-12)


def test_norm_preserved_over_random_layers():
    rng = np.random.default_rng(0)
    h = maxcut_hamiltonian(random_graph(6, 0.5, 0))
    st = plus_state(6)
    for _ in range(200):
        st = apply_mixer(apply_phase(st, h, rng.uniform(-3, 3)), rng.uniform(-3, 3))
    assert abs(np.linalg.norm(st) - 1) <= 1e-9


def test_gate_counts(k22):
    h30 = maxcut_hamiltonian(gnm(10, 30, 0))
    gc = gate_counts([h30] * 4)
    assert gc.rzz_per_layer == (30,) * 4
    assert gc.cnot_total == 60 * 4
    assert gc.rx_per_layer == (10,) * 4
    hb = maxcut_hamiltonian(k22)
    assert gate_counts([hb, hb]).rzz_per_layer == (4, 4)
    assert gate_counts([DiagonalHamiltonian(3)]).rzz_per_layer == (0,)
