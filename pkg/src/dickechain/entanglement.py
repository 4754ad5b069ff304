"""End-to-end entanglement metrics.

Entropies are in bits; the two-qudit ceiling is log2(N+1).  Pure
outcomes are always handled through singular values of the W x W
amplitude matrix, never by forming the W^2 x W^2 projector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import BipartiteAmplitudes
from .errors import ImpossibleOutcomeError, ValidityError

EIG_ZERO_CUTOFF = 1e-15   # spectrum weights below this count as exact zeros
EIG_NEG_TOLERANCE = 1e-10  # eigenvalues in [-tol, 0) are decomposition noise


@dataclass(frozen=True)
class EntanglementReport:
    E: float
    E_norm: float
    p_q: float
    negativity: float | None = None


def _entropy_bits(weights: np.ndarray) -> float:
    w = weights[weights > EIG_ZERO_CUTOFF]
    w = w / np.sum(w)
    return float(-np.sum(w * np.log2(w))) + 0.0  # avoid -0.0


def schmidt_entropy(A: BipartiteAmplitudes, with_negativity: bool = True) -> EntanglementReport:
    """Entropy of entanglement of the (normalized) pure outcome state.

    Singular values s_i of A give Schmidt weights l_i = s_i^2 / sum s^2;
    E = -sum l log2 l.  The pure-state log negativity 2 log2(sum s / ||s||)
    comes along for free.
    """
    s = np.linalg.svd(A.matrix, compute_uv=False)
    total = float(np.sum(s**2))
    if total == 0.0:
        raise ImpossibleOutcomeError("schmidt_entropy: zero amplitude matrix (p_q = 0)")
    E = _entropy_bits(s**2)
    neg = None
    if with_negativity:
        neg = 2.0 * math.log2(float(np.sum(s)) / math.sqrt(total))
    return EntanglementReport(
        E=E, E_norm=E / math.log2(A.N + 1), p_q=A.p_q, negativity=neg
    )


def reduced_density(A: BipartiteAmplitudes) -> np.ndarray:
    """rho_M = Tr_1 |Psi><Psi| / p_q over the second index of A."""
    ss = float(np.sum(np.abs(A.matrix) ** 2))
    if ss == 0.0:
        raise ImpossibleOutcomeError("reduced_density: zero amplitude matrix (p_q = 0)")
    # entry (m, m') = sum_k A[k, m] conj(A[k, m']); scale factors cancel
    return (A.matrix.T @ A.matrix.conj()) / ss


def von_neumann_from_density(rho: np.ndarray) -> float:
    """-sum l log2 l over the spectrum, with small-negative clamping."""
    lam = np.linalg.eigvalsh(rho)
    if lam.min() < -EIG_NEG_TOLERANCE:
        raise ValidityError(
            f"von_neumann_from_density: eigenvalue {lam.min():.3e} below -{EIG_NEG_TOLERANCE}"
        )
    lam = np.clip(lam, 0.0, None)
    return _entropy_bits(lam)


def log_negativity(rho: np.ndarray, dims: tuple[int, int]) -> float:
    """log2 of the trace norm of the partial transpose on the first factor."""
    d1, d2 = dims
    if rho.shape != (d1 * d2, d1 * d2):
        raise ValidityError(f"log_negativity: shape {rho.shape} does not match dims {dims}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-8:
        raise ValidityError("log_negativity: input not Hermitian within 1e-8")
    pt = (
        rho.reshape(d1, d2, d1, d2)
        .transpose(2, 1, 0, 3)
        .reshape(d1 * d2, d1 * d2)
    )
    lam = np.linalg.eigvalsh(pt)
    return float(np.log2(np.sum(np.abs(lam))))
