import math

import numpy as np
import pytest

from dickechain import chain, entanglement
from dickechain.chain import BipartiteAmplitudes
from dickechain.dicke import make_window
from dickechain.errors import ImpossibleOutcomeError, ValidityError

from conftest import random_density


def bip(matrix, log_scale=0.0):
    N = matrix.shape[0] - 1
    return BipartiteAmplitudes(
        N=N, window=make_window(N, math.inf), matrix=np.asarray(matrix), log_scale=log_scale
    )


def test_rank_one_has_zero_entropy(rng):
    u = rng.normal(size=5) + 1j * rng.normal(size=5)
    v = rng.normal(size=5) + 1j * rng.normal(size=5)
    rep = entanglement.schmidt_entropy(bip(np.outer(u, v)))
    assert rep.E == 0.0 and rep.E_norm == 0.0
    assert rep.negativity == pytest.approx(0.0, abs=1e-12)


def test_maximally_entangled():
    d = 6
    rep = entanglement.schmidt_entropy(bip(np.eye(d) / math.sqrt(d)))
    assert rep.E == pytest.approx(math.log2(d), abs=1e-12)
    assert rep.E_norm == pytest.approx(1.0, abs=1e-12)
    assert rep.negativity == pytest.approx(math.log2(d), abs=1e-12)
    assert rep.p_q == pytest.approx(1.0, abs=1e-12)


def test_zero_matrix_raises():
    z = bip(np.zeros((4, 4)))
    with pytest.raises(ImpossibleOutcomeError):
        entanglement.schmidt_entropy(z)
    with pytest.raises(ImpossibleOutcomeError):
        entanglement.reduced_density(z)


def test_schmidt_equals_reduced_density_entropy():
    cfg = chain.chain_config(3, 3, math.pi / 2)
    A = chain.closed_form_amplitudes(cfg)
    E_svd = entanglement.schmidt_entropy(A).E
    E_rho = entanglement.von_neumann_from_density(entanglement.reduced_density(A))
    assert abs(E_svd - E_rho) <= 1e-10


def test_reduced_density_brute_force(rng):
    W = 3
    A = rng.normal(size=(W, W)) + 1j * rng.normal(size=(W, W))
    psi = A.reshape(-1)
    rho_full = np.outer(psi, psi.conj()) / np.vdot(psi, psi).real
    rho_M = np.trace(rho_full.reshape(W, W, W, W), axis1=0, axis2=2)
    got = entanglement.reduced_density(bip(A))
    assert np.max(np.abs(got - rho_M)) <= 1e-12
    # spectrum of rho_M is the normalized squared singular values of A
    s = np.linalg.svd(A, compute_uv=False)
    lam = np.sort(np.linalg.eigvalsh(got))
    assert np.max(np.abs(lam - np.sort(s**2 / np.sum(s**2)))) <= 1e-12


def test_von_neumann_examples():
    d = 8
    assert entanglement.von_neumann_from_density(np.eye(d) / d) == pytest.approx(
        math.log2(d), abs=1e-12
    )
    pure = np.zeros((d, d))
    pure[2, 2] = 1.0
    assert entanglement.von_neumann_from_density(pure) == 0.0
    rho = np.diag([0.5, 0.25, 0.25])
    assert entanglement.von_neumann_from_density(rho) == pytest.approx(1.5, abs=1e-12)


def test_von_neumann_negative_eigenvalues():
    rho = np.diag([1.0 + 1e-5, -1e-5])
    with pytest.raises(ValidityError):
        entanglement.von_neumann_from_density(rho)
    rho = np.diag([1.0 + 1e-12, -1e-12])  # decomposition noise is clamped
    assert entanglement.von_neumann_from_density(rho) == pytest.approx(0.0, abs=1e-10)


def test_log_negativity_product_state():
    rho1 = np.array([[0.5, 0.5], [0.5, 0.5]])
    rho2 = np.array([[1.0, 0.0], [0.0, 0.0]])
    assert entanglement.log_negativity(np.kron(rho1, rho2), (2, 2)) == pytest.approx(
        0.0, abs=1e-12
    )


def test_log_negativity_bell_state():
    psi = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)
    rho = np.outer(psi, psi)
    assert entanglement.log_negativity(rho, (2, 2)) == pytest.approx(1.0, abs=1e-12)


def test_log_negativity_matches_pure_formula(rng):
    W = 5
    A = rng.normal(size=(W, W)) + 1j * rng.normal(size=(W, W))
    rep = entanglement.schmidt_entropy(bip(A))
    psi = A.reshape(-1)
    rho = np.outer(psi, psi.conj()) / np.vdot(psi, psi).real
    assert entanglement.log_negativity(rho, (W, W)) == pytest.approx(
        rep.negativity, abs=1e-8
    )


def test_log_negativity_validation(rng):
    rho = random_density(rng, 4)
    with pytest.raises(ValidityError):
        entanglement.log_negativity(rho, (3, 2))
    bad = rho.copy()
    bad[0, 1] += 1e-3
    with pytest.raises(ValidityError):
        entanglement.log_negativity(bad, (2, 2))


def test_metrics_invariant_under_diagonal_phases(rng):
    W = 7
    A = rng.normal(size=(W, W)) + 1j * rng.normal(size=(W, W))
    D1 = np.exp(1j * rng.uniform(0, 2 * math.pi, W))
    D2 = np.exp(1j * rng.uniform(0, 2 * math.pi, W))
    r0 = entanglement.schmidt_entropy(bip(A))
    r1 = entanglement.schmidt_entropy(bip(D1[:, None] * A * D2[None, :]))
    assert r1.E == pytest.approx(r0.E, abs=1e-10)
    assert r1.negativity == pytest.approx(r0.negativity, abs=1e-10)
    assert r1.p_q == pytest.approx(r0.p_q, rel=1e-12)


def test_mixing_raises_entropy():
    d = 6
    psi = np.ones(d) / math.sqrt(d)
    rho = np.outer(psi, psi)
    last = entanglement.von_neumann_from_density(rho)
    for eps in (0.1, 0.5):
        mixed = (1 - eps) * rho + eps * np.eye(d) / d
        S = entanglement.von_neumann_from_density(mixed)
        assert S > last
        last = S
    assert last <= math.log2(d) + 1e-12


def test_entropy_bounds(rng):
    W = 9
    A = rng.normal(size=(W, W)) + 1j * rng.normal(size=(W, W))
    rep = entanglement.schmidt_entropy(bip(A))
    assert 0.0 <= rep.E <= math.log2(W) + 1e-12
    assert rep.negativity >= rep.E - 1e-12  # Renyi-1/2 dominates von Neumann
