"""Collective S_z dephasing of the chain.

The master equation has Hamiltonian H = sum_j (-1)^j k_j k_{j+1} and
jump operators S_z per node, all diagonal in the product Dicke basis,
so it decouples element-wise and integrates exactly:

    rho_t[k, k'] = rho_0[k, k'] * exp(-i (E(k) - E(k')) t
                                      - 2 gamma t sum_j (k_j - k_j')^2)

(the rate uses (s - s')^2 = 4 (k - k')^2 with s = 2k - N).  A fixed-step
RK4 integrator of the same equation is kept purely as an oracle.  The
measurement pipeline carries the mixed state to an end-to-end two-node
density matrix without ever materializing the pre-measurement rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import dicke
from .chain import ChainConfig
from .entanglement import (
    EntanglementReport,
    log_negativity,
    von_neumann_from_density,
)
from .errors import (
    CapacityError,
    ConfigError,
    ImpossibleOutcomeError,
    SimulationError,
)

RK4_STATE_CAP = 10**4
DENSE_ENTRY_CAP = 2 * 10**7
MAGIC_TIMES = (math.pi / 3, math.pi / 2, 2 * math.pi / 3, math.pi)


@dataclass(frozen=True)
class DephasingParams:
    gamma: float
    t: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ConfigError(f"DephasingParams: gamma={self.gamma} must be >= 0")


def product_basis(window: dicke.TruncationWindow, M: int) -> np.ndarray:
    """All windowed index vectors (k_1 .. k_M), shape (W^M, M)."""
    k = window.indices()
    return np.array(list(product(k, repeat=M)), dtype=np.int64)


def bond_energies(kvecs: np.ndarray) -> np.ndarray:
    """E(k) = sum_j (-1)^j k_j k_{j+1} (1-based j) for each index vector."""
    kvecs = np.asarray(kvecs, dtype=float)
    signs = np.array([(-1.0) ** (j + 1) for j in range(kvecs.shape[1] - 1)])
    return np.sum(signs * kvecs[:, :-1] * kvecs[:, 1:], axis=1)


def lindblad_element_propagator(
    k: tuple[int, ...],
    k_prime: tuple[int, ...],
    params: DephasingParams,
    N: int,
    M: int,
) -> complex:
    """Exact multiplier of rho[k, k'] after time t at rate gamma."""
    if len(k) != M or len(k_prime) != M:
        raise ConfigError("lindblad_element_propagator: index length != M")
    ka = np.asarray(k, dtype=float)
    kb = np.asarray(k_prime, dtype=float)
    dE = bond_energies(ka[None, :])[0] - bond_energies(kb[None, :])[0]
    decay = 2.0 * params.gamma * params.t * float(np.sum((ka - kb) ** 2))
    return complex(np.exp(-1j * dE * params.t - decay))


def analytic_dephased_rho(
    rho0: np.ndarray,
    params: DephasingParams,
    window: dicke.TruncationWindow,
    M: int,
) -> np.ndarray:
    """Full rho(t) by the element-wise propagator (oracle-scale sizes)."""
    kvecs = product_basis(window, M)
    if rho0.shape != (len(kvecs), len(kvecs)):
        raise ConfigError("analytic_dephased_rho: rho0 shape mismatch")
    E = bond_energies(kvecs)
    dk2 = np.sum(
        (kvecs[:, None, :] - kvecs[None, :, :]) ** 2, axis=2, dtype=float
    )
    mult = np.exp(
        -1j * (E[:, None] - E[None, :]) * params.t
        - 2.0 * params.gamma * params.t * dk2
    )
    return rho0 * mult


def rk4_lindblad(
    rho0: np.ndarray,
    params: DephasingParams,
    window: dicke.TruncationWindow,
    M: int,
    dt: float | None = None,
) -> np.ndarray:
    """Classic fixed-step RK4 for the same master equation; oracle only.

    Default step min(1e-3, 0.1 / (gamma N^2 + 1)) resolves the fastest
    decay scale gamma max(s - s')^2.
    """
    kvecs = product_basis(window, M)
    if len(kvecs) > RK4_STATE_CAP:
        raise CapacityError(
            f"rk4_lindblad: {len(kvecs)} basis states exceed cap {RK4_STATE_CAP}"
        )
    if rho0.shape != (len(kvecs), len(kvecs)):
        raise ConfigError("rk4_lindblad: rho0 shape mismatch")
    N = window.N
    if dt is None:
        dt = min(1e-3, 0.1 / (params.gamma * N * N + 1.0))
    E = bond_energies(kvecs)
    s = 2.0 * kvecs.T.astype(float) - N  # (M, W^M) S_z eigenvalues per node
    s_sq = np.sum(s**2, axis=0)
    gamma = params.gamma

    def rhs(r):
        out = -1j * (E[:, None] * r - r * E[None, :])
        if gamma:
            out -= (gamma / 2.0) * (s_sq[:, None] + s_sq[None, :]) * r
            for j in range(M):
                out += gamma * np.outer(s[j], s[j]) * r
        return out

    if params.t == 0.0:
        return rho0.astype(complex)
    steps = max(1, math.ceil(params.t / dt))
    h = params.t / steps
    r = rho0.astype(complex)
    for _ in range(steps):
        k1 = rhs(r)
        k2 = rhs(r + 0.5 * h * k1)
        k3 = rhs(r + 0.5 * h * k2)
        k4 = rhs(r + h * k3)
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return r


def _measurement_weights(config: ChainConfig, j: int) -> np.ndarray:
    """m_j(k) = <q_j|^(x)|k> e^{i k phi} over the window for node j (1-based)."""
    k = config.window.indices()
    row = dicke.x_overlap_row(config.outcomes[j - 2], config.N)[k]
    return row * np.exp(1j * k * config.phi)


def _dephased_three_node(
    config: ChainConfig, params: DephasingParams
) -> tuple[np.ndarray, float]:
    """End-to-end rho for M=3 in O(W^5) without the pre-measurement rho.

    The pure part factors over the middle index: the evolved amplitude
    for fixed k_2 is x_{k2} (x) y_{k2} with x_{k2}(k1) = a(k1) e^{i t k2 k1}
    and y_{k2}(k3) = a(k3) e^{-i t k2 k3}.  Dephasing multiplies in the
    middle-index Gaussian inside the measurement Gram matrix w and the
    end-node Gaussian G as a Hadamard factor, both PSD, so the result is
    PSD by construction.
    """
    N, t = config.N, config.t
    win = config.window
    k = win.indices()
    W = k.size
    a = dicke.x_polarized_amplitudes(N, win)
    ma = _measurement_weights(config, 2) * a
    kk = np.outer(k, k)
    X = a[:, None] * np.exp(1j * t * kk)  # column k2: x_{k2}
    Y = a[:, None] * np.exp(-1j * t * kk)
    V = (X[:, None, :] * Y[None, :, :]).reshape(W * W, W)
    dk2 = (k[:, None] - k[None, :]).astype(float) ** 2
    damp = np.exp(-2.0 * params.gamma * params.t * dk2)
    w = np.outer(ma, ma.conj()) * damp
    rho = V @ w @ V.conj().T
    g = damp  # same Gaussian kernel for every node
    G = (g[:, None, :, None] * g[None, :, None, :]).reshape(W * W, W * W)
    rho *= G
    p_q = float(np.trace(rho).real)
    return rho, p_q


def _dephased_dense_general(
    config: ChainConfig, params: DephasingParams
) -> tuple[np.ndarray, float]:
    """General-M reference path: materializes the windowed rho(t)."""
    N, M, t = config.N, config.M, config.t
    win = config.window
    W = win.size
    if W ** (2 * M) > DENSE_ENTRY_CAP:
        raise CapacityError(
            f"dephased_end_to_end: W^(2M) = {W ** (2 * M)} entries exceed {DENSE_ENTRY_CAP}"
        )
    k = win.indices()
    a = dicke.x_polarized_amplitudes(N, win)
    psi = np.array(1.0 + 0.0j)
    for _ in range(M):
        psi = np.multiply.outer(psi, a)
    psi = psi.reshape((W,) * M)
    for bond in range(M - 1):
        sign = -1.0 if bond % 2 == 0 else 1.0
        phase = np.exp(-1j * t * sign * np.outer(k, k))
        shape = [1] * M
        shape[bond] = W
        shape[bond + 1] = W
        psi = psi * phase.reshape(shape)
    rho = np.multiply.outer(psi, psi.conj())  # axes k_1..k_M, k_1'..k_M'
    damp = np.exp(
        -2.0 * params.gamma * params.t * (k[:, None] - k[None, :]).astype(float) ** 2
    )
    for j in range(M):
        shape = [1] * (2 * M)
        shape[j] = W
        shape[M + j] = W
        rho = rho * damp.reshape(shape)
    # contract intermediate nodes with m_j on the ket side, conj on the bra
    letters = "abcdefghijklmnopqrstuvwx"[: 2 * M]
    operands = [rho]
    spec = [letters]
    for j in range(2, M):
        m = _measurement_weights(config, j)
        operands += [m, m.conj()]
        spec += [letters[j - 1], letters[M + j - 1]]
    keep = letters[0] + letters[M - 1] + letters[M] + letters[2 * M - 1]
    rho1M = np.einsum(",".join(spec) + "->" + keep, *operands)
    rho1M = rho1M.reshape(W * W, W * W)
    return rho1M, float(np.trace(rho1M).real)


def dephased_end_to_end(
    config: ChainConfig, params: DephasingParams
) -> tuple[np.ndarray, float, EntanglementReport]:
    """Mixed-state pipeline: dephased evolution, intermediate measurement,
    normalized end-to-end density matrix with its entanglement report."""
    if config.M == 3:
        rho, p_q = _dephased_three_node(config, params)
    else:
        rho, p_q = _dephased_dense_general(config, params)
    if p_q < 1e-300:
        raise ImpossibleOutcomeError(
            f"dephased_end_to_end: outcome probability {p_q} vanishes"
        )
    rho = rho / p_q
    rho = 0.5 * (rho + rho.conj().T)
    W = config.window.size
    neg = log_negativity(rho, (W, W))
    red = np.trace(rho.reshape(W, W, W, W), axis1=0, axis2=2)
    E = von_neumann_from_density(red)
    report = EntanglementReport(
        E=E, E_norm=E / math.log2(config.N + 1), p_q=p_q, negativity=neg
    )
    return rho, p_q, report


def magic_time_scan(
    n_list,
    gamma_grid,
    times=MAGIC_TIMES,
    c: float = 3.0,
    phi: float = 0.0,
) -> list[dict]:
    """Negativity table over (N, t, gamma) cells; failures mark the cell."""
    from .chain import chain_config

    rows = []
    for N in n_list:
        for t in times:
            for gamma in gamma_grid:
                row = {"N": N, "t": t, "gamma": gamma, "negativity": None,
                       "E": None, "p_q": None, "error": ""}
                try:
                    cfg = chain_config(N=N, M=3, t=t, c=c, phi=phi)
                    _, p_q, report = dephased_end_to_end(
                        cfg, DephasingParams(gamma=gamma, t=t)
                    )
                    row.update(
                        negativity=report.negativity, E=report.E, p_q=p_q
                    )
                except SimulationError as exc:
                    row["error"] = f"{type(exc).__name__}: {exc}"
                rows.append(row)
    return rows
