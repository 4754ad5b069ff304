"""Chain states: exact product-basis evolution and the closed-form
transfer-matrix contraction over truncated windows.

The chain Hamiltonian is diagonal in the product Dicke basis,
H |k_1 .. k_M> = sum_j (-1)^j k_j k_{j+1} |k_1 .. k_M> (j = 1-based),
so exact evolution is a phase per basis state (no exponentiation).
After measuring every intermediate node in the x basis the surviving
amplitude matrix A(k_1, k_M) factors into per-node transfer matrices:
odd nodes keep their Dicke index and contribute a diagonal factor,
even nodes are integrated out into an equatorial-overlap coupling of
their two neighbors.  Everything here is unnormalized; p_q = sum |A|^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dicke
from .dicke import TruncationWindow, make_window
from .errors import CapacityError, ConfigError

EXACT_AMPLITUDE_CAP = 10**7


@dataclass(frozen=True)
class ChainConfig:
    """One experiment: M nodes of N atoms, interaction time t, outcomes q."""

    N: int
    M: int
    t: float
    outcomes: tuple[int, ...]
    window: TruncationWindow
    phi: float = 0.0
    c_t: float = 100.0

    def __post_init__(self):
        if self.M < 2:
            raise ConfigError(f"ChainConfig: M={self.M} must be >= 2")
        if self.N < 1:
            raise ConfigError(f"ChainConfig: N={self.N} must be >= 1")
        if len(self.outcomes) != self.M - 2:
            raise ConfigError(
                f"ChainConfig: {len(self.outcomes)} outcomes for M={self.M}; "
                f"need M-2 = {self.M - 2}"
            )
        if any(not 0 <= q <= self.N for q in self.outcomes):
            raise ConfigError(f"ChainConfig: outcomes {self.outcomes} outside 0..{self.N}")
        if self.window.N != self.N:
            raise ConfigError("ChainConfig: window built for a different N")
        if not math.isfinite(self.t):
            raise ConfigError(f"ChainConfig: t={self.t} not finite")


def chain_config(
    N: int,
    M: int,
    t: float,
    outcomes: tuple[int, ...] | None = None,
    c: float = math.inf,
    phi: float = 0.0,
    c_t: float = 100.0,
) -> ChainConfig:
    """ChainConfig with the window built from c and default outcomes q_j = N."""
    if outcomes is None:
        outcomes = (N,) * (M - 2)
    return ChainConfig(
        N=N, M=M, t=t, outcomes=tuple(outcomes), window=make_window(N, c), phi=phi, c_t=c_t
    )


@dataclass(frozen=True)
class FullState:
    """Evolved state over the full (N+1)^M product basis."""

    N: int
    M: int
    t: float
    amplitudes: np.ndarray  # shape (N+1,) * M


@dataclass(frozen=True)
class BipartiteAmplitudes:
    """Unnormalized end-to-end amplitude matrix, scaled for range safety.

    The physical matrix is matrix * exp(log_scale); entries of `matrix`
    are kept at order unity so that sums of squares never overflow.
    When phase_reduced is set the matrix is the real representative of
    the phase-factored form D1 A D2 (D diagonal unitary): all singular
    values, probabilities and entanglement metrics are unchanged, but
    individual entries carry no phase information.
    """

    N: int
    window: TruncationWindow
    matrix: np.ndarray
    log_scale: float = 0.0
    phase_reduced: bool = False

    @property
    def log_p_q(self) -> float:
        ss = float(np.sum(np.abs(self.matrix) ** 2))
        if ss == 0.0:
            return -math.inf
        return 2.0 * self.log_scale + math.log(ss)

    @property
    def p_q(self) -> float:
        lp = self.log_p_q
        return 0.0 if lp == -math.inf else math.exp(lp)

    def dense(self) -> np.ndarray:
        """Matrix in linear scale; only safe at moderate N."""
        return self.matrix * math.exp(self.log_scale)


def _rescaled(matrix: np.ndarray, log_scale: float) -> tuple[np.ndarray, float]:
    peak = float(np.max(np.abs(matrix)))
    if peak == 0.0 or not math.isfinite(peak):
        return matrix, log_scale
    return matrix / peak, log_scale + math.log(peak)


def exact_evolve(config: ChainConfig, cap: int = EXACT_AMPLITUDE_CAP) -> FullState:
    """Evolved state over the full basis: x-polarized product state with the
    bond phases exp(-i t (-1)^j k_j k_{j+1}) applied entry-wise."""
    N, M, t = config.N, config.M, config.t
    dim = (N + 1) ** M
    if dim > cap:
        raise CapacityError(
            f"exact_evolve: (N+1)^M = {dim} exceeds cap {cap}; use the windowed closed form"
        )
    full = make_window(N, math.inf)
    a = dicke.x_polarized_amplitudes(N, full)
    amps = np.array(1.0 + 0.0j)
    for _ in range(M):
        amps = np.multiply.outer(amps, a)
    amps = amps.reshape((N + 1,) * M)
    k = np.arange(N + 1, dtype=float)
    for bond in range(M - 1):
        sign = -1.0 if bond % 2 == 0 else 1.0  # (-1)^j for 1-based j = bond+1
        phase = np.exp(-1j * t * sign * np.outer(k, k))
        shape = [1] * M
        shape[bond] = N + 1
        shape[bond + 1] = N + 1
        amps = amps * phase.reshape(shape)
    return FullState(N=N, M=M, t=t, amplitudes=amps)


def project_intermediates(
    state: FullState, q: tuple[int, ...], phi: float
) -> BipartiteAmplitudes:
    """Rotate each intermediate node by e^{i n phi} and project onto <q_j|^(x)."""
    N, M = state.N, state.M
    if len(q) != M - 2:
        raise ConfigError(f"project_intermediates: need {M - 2} outcomes, got {len(q)}")
    k = np.arange(N + 1)
    rot = np.exp(1j * k * phi)
    out = state.amplitudes
    for qj in q:
        m = dicke.x_overlap_row(qj, N) * rot
        # contract the current axis 1 (the leftmost unmeasured intermediate)
        out = np.einsum("ij...,j->i...", out, m)
    matrix, log_scale = _rescaled(out.astype(complex), 0.0)
    return BipartiteAmplitudes(
        N=N, window=make_window(N, math.inf), matrix=matrix, log_scale=log_scale
    )


def _equatorial_transfer(
    q: int, N: int, t: float, phi: float, window: TruncationWindow
) -> np.ndarray:
    """Coupling of the two neighbors of a measured even node: entry (kp, kn)
    is the equatorial overlap at angle (kp - kn) t + phi.  Toeplitz, so only
    2W - 1 distinct values are evaluated."""
    k = window.indices()
    deltas = np.arange(window.k_min - window.k_max, window.k_max - window.k_min + 1)
    tab = dicke.coherent_x_overlap_many(q, N, deltas * t + phi)
    idx = (k[:, None] - k[None, :]) - deltas[0]
    return tab[idx]


def closed_form_amplitudes(config: ChainConfig) -> BipartiteAmplitudes:
    """A(k_1, k_M) by left-to-right transfer-matrix contraction over the window.

    Matches exact_evolve + project_intermediates entry-wise (same global
    prefactor), while touching only W x W objects.
    """
    N, M, t, phi, win = config.N, config.M, config.t, config.phi, config.window
    if M < 3:
        raise ConfigError(f"closed_form_amplitudes: M={config.M} must be >= 3")
    if win.size < 1:
        raise ConfigError("closed_form_amplitudes: empty window")
    k = win.indices()
    a = dicke.x_polarized_amplitudes(N, win)
    R = np.diag(a).astype(complex)
    log_scale = 0.0
    for j in range(2, M):  # intermediate nodes, 1-based
        if j % 2 == 0:
            R = R @ _equatorial_transfer(config.outcomes[j - 2], N, t, phi, win)
        else:
            m = dicke.x_overlap_row(config.outcomes[j - 2], N)[k] * a * np.exp(
                1j * k * phi
            )
            R = R * m[None, :]
        R, log_scale = _rescaled(R, log_scale)
    if M % 2 == 0:
        # the coherent label of node M-1 expands into node M's Dicke basis
        F = np.exp(1j * t * np.outer(k, k)) * a[None, :]
        R = R @ F
    else:
        R = R * a[None, :]
    R, log_scale = _rescaled(R, log_scale)
    return BipartiteAmplitudes(N=N, window=win, matrix=R, log_scale=log_scale)


def phase_reduced_core(config: ChainConfig) -> BipartiteAmplitudes:
    """Real representative of the M=3 amplitude matrix.

    For M=3 the only complex factors are i^(N-q) e^{i N alpha/2} with
    alpha = (k_1 - k_3) t + phi; they split into a global phase and
    diagonal phases on k_1 and k_3, which no spectrum-derived quantity
    sees.  Dropping them roughly halves the cost of the dominant SVD
    and sidesteps large-N phase wraparound entirely.
    """
    if config.M != 3:
        raise ConfigError("phase_reduced_core: only defined for M = 3")
    N, t, phi, win = config.N, config.t, config.phi, config.window
    k = win.indices()
    a = dicke.x_polarized_amplitudes(N, win)
    deltas = np.arange(win.k_min - win.k_max, win.k_max - win.k_min + 1)
    tab = dicke.coherent_x_overlap_core(config.outcomes[0], N, deltas * t + phi)
    idx = (k[:, None] - k[None, :]) - deltas[0]
    R = a[:, None] * tab[idx] * a[None, :]
    R, log_scale = _rescaled(R, 0.0)
    return BipartiteAmplitudes(
        N=N, window=win, matrix=R, log_scale=log_scale, phase_reduced=True
    )


def time_grid(N: int, c_t: float, t_max: float) -> np.ndarray:
    """Uniform grid over [0, t_max] with spacing pi / (c_t N)."""
    if c_t < 1:
        raise ConfigError(f"time_grid: c_t={c_t} must be >= 1")
    if t_max < 0:
        raise ConfigError(f"time_grid: t_max={t_max} must be >= 0")
    dt = math.pi / (c_t * N)
    n = int(math.floor(t_max / dt + 1e-9))
    return np.arange(n + 1) * dt
