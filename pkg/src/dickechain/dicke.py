"""Collective-spin algebra in the symmetric (Dicke) subspace.

Conventions: for N spins-1/2 the Dicke state |k>, k = 0..N, has
S_z eigenvalue 2k - N (J = N/2, m = k - N/2).  The x basis |q>^(x)
is the eigenbasis of S_x with the same eigenvalue labelling,
S_x |q>^(x) = (2q - N) |q>^(x), fixed up to sign by requiring
<q|^(x)|+x> > 0 where |+x> is the fully x-polarized coherent state.
With that choice the overlap matrix U[q, k] = <q|^(x)|k> is real,
symmetric and orthogonal.

All combinatorics run in log space so the module stays exact up to
N = 10^6 where C(N, k) overflows any float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .errors import ConfigError

LN2 = math.log(2.0)

# Above this N the explicit finite-sum evaluation of <q|^(x)|k> gives way
# to the tridiagonal eigenvector path; the two agree to ~1e-14 where they
# overlap (see selfcheck and tests).
EXACT_OVERLAP_LIMIT = 60


def log_binomial(N: int, k: int) -> float:
    """ln C(N, k) via log-gamma; exact to ~1e-14 relative up to N = 10^6."""
    if not 0 <= k <= N:
        raise ConfigError(f"log_binomial: k={k} outside 0..{N}")
    k = min(k, N - k)  # bitwise symmetric in k <-> N-k
    return math.lgamma(N + 1) - math.lgamma(k + 1) - math.lgamma(N - k + 1)


def _log_binomial_row(N: int, k: np.ndarray) -> np.ndarray:
    k = np.minimum(k, N - k)
    return gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1)


@dataclass(frozen=True)
class TruncationWindow:
    """Contiguous Dicke-index interval [k_min, k_max] of half-width K."""

    N: int
    c: float
    K: int
    k_min: int
    k_max: int

    @property
    def size(self) -> int:
        return self.k_max - self.k_min + 1

    def indices(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def is_full(self) -> bool:
        return self.k_min == 0 and self.k_max == self.N


def make_window(N: int, c: float) -> TruncationWindow:
    """Window of half-width K = floor(c sqrt(N) / 2) about floor(N/2).

    c = inf keeps the full basis.  The tiny nudge before floor guards
    against c*sqrt(N)/2 landing an ulp below an integer.
    """
    if N < 1:
        raise ConfigError(f"make_window: N={N} must be >= 1")
    if not c > 0:
        raise ConfigError(f"make_window: c={c} must be positive")
    if math.isinf(c):
        K = N
    else:
        K = int(math.floor(c * math.sqrt(N) / 2 + 1e-9))
    center = N // 2
    return TruncationWindow(
        N=N, c=c, K=K, k_min=max(0, center - K), k_max=min(N, center + K)
    )


@dataclass(frozen=True)
class CoherentParams:
    """Single-spin amplitudes (alpha, beta) of a spin coherent state."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ConfigError(f"CoherentParams: |a|^2+|b|^2 = {norm}, not 1")

    @classmethod
    def equatorial(cls, alpha_phase: float) -> "CoherentParams":
        """(e^{i alpha}/sqrt2, 1/sqrt2): equator of the Bloch sphere."""
        s = 1.0 / math.sqrt(2.0)
        return cls(alpha=s * complex(math.cos(alpha_phase), math.sin(alpha_phase)), beta=s)

    @classmethod
    def x_polarized(cls) -> "CoherentParams":
        s = 1.0 / math.sqrt(2.0)
        return cls(alpha=s, beta=s)


def coherent_dicke_amplitudes(
    N: int, params: CoherentParams, window: TruncationWindow
) -> np.ndarray:
    """Amplitudes alpha^k beta^(N-k) sqrt(C(N,k)) over the window, log-space."""
    if window.N != N:
        raise ConfigError("coherent_dicke_amplitudes: window built for different N")
    k = window.indices()
    la, lb = abs(params.alpha), abs(params.beta)
    logmag = 0.5 * _log_binomial_row(N, k)
    logmag = logmag + np.where(k > 0, k * math.log(la) if la > 0 else -np.inf, 0.0)
    logmag = logmag + np.where(
        k < N, (N - k) * math.log(lb) if lb > 0 else -np.inf, 0.0
    )
    phase = k * np.angle(params.alpha) + (N - k) * np.angle(params.beta)
    out = np.exp(logmag + 1j * phase)
    out[np.isneginf(logmag)] = 0.0
    return out


def x_polarized_amplitudes(N: int, window: TruncationWindow) -> np.ndarray:
    """Real amplitudes sqrt(C(N,k))/2^(N/2) of |+x> over the window."""
    k = window.indices()
    return np.exp(0.5 * _log_binomial_row(N, k) - 0.5 * N * LN2)


def _x_overlap_row_exact(q: int, N: int) -> np.ndarray:
    """<q|^(x)|k> for all k by expanding (1-x)^q (1+x)^(N-q) exactly.

    The coefficient of x^k in that product is the finite alternating sum
    of the textbook double-sum expression; doing the convolution over
    Python integers removes its float cancellation (which already costs
    eight digits near N = 60).
    """
    neg = [math.comb(q, i) * (-1) ** i for i in range(q + 1)]
    pos = [math.comb(N - q, i) for i in range(N - q + 1)]
    coeff = [0] * (N + 1)
    for i, a in enumerate(neg):
        if a:
            for j, b in enumerate(pos):
                coeff[i + j] += a * b
    k = np.arange(N + 1)
    lw = 0.5 * (
        gammaln(k + 1)
        + gammaln(N - k + 1)
        - math.lgamma(q + 1)
        - math.lgamma(N - q + 1)
    ) - 0.5 * N * LN2
    out = np.zeros(N + 1)
    for kk in range(N + 1):
        s = coeff[kk]
        if s == 0:
            continue
        sign = -1.0 if ((N - q - kk) % 2) else 1.0
        out[kk] = sign * math.copysign(math.exp(lw[kk] + math.log(abs(s))), s)
    return out


def _x_overlap_row_eigen(q: int, N: int) -> np.ndarray:
    """<q|^(x)|k> for all k as the q-th eigenvector of tridiagonal S_x.

    In the Dicke basis S_x has zero diagonal and off-diagonal
    sqrt((k+1)(N-k)) (Schwinger form).  LAPACK's bisection plus inverse
    iteration resolves the single eigenpair in O(N); the overall sign is
    anchored by the overlap with an equatorial coherent state, whose
    closed form fixes the phase convention.
    """
    k = np.arange(N, dtype=float)
    off = np.sqrt((k + 1.0) * (N - k))
    _, v = eigh_tridiagonal(
        np.zeros(N + 1), off, select="i", select_range=(q, q), check_finite=False
    )
    row = v[:, 0]
    # anchor: contract against |e^{i a*}/sqrt2, 1/sqrt2>> at the angle where
    # |<q|^(x)| that state>| peaks, and compare with the closed form
    if q == N:
        alpha = 0.0
    elif q == 0:
        alpha = math.pi
    else:
        alpha = 2.0 * math.acos(math.sqrt(q / N))
    kk = np.arange(N + 1)
    amp = np.exp(
        0.5 * _log_binomial_row(N, kk) - 0.5 * N * LN2 + 1j * kk * alpha
    )
    got = np.dot(row, amp)
    want = coherent_x_overlap(q, N, alpha)
    if (got * np.conj(want)).real < 0.0:
        row = -row
    return row


def _x_overlap_row_build(q: int, N: int, method: str) -> np.ndarray:
    if method == "exact" or (method == "auto" and N <= EXACT_OVERLAP_LIMIT):
        row = _x_overlap_row_exact(q, N)
    else:
        row = _x_overlap_row_eigen(q, N)
    row.flags.writeable = False
    return row


_x_overlap_row_cached = lru_cache(maxsize=64)(_x_overlap_row_build)


def x_overlap_row(q: int, N: int, method: str = "auto") -> np.ndarray:
    """All overlaps <q|^(x)|k>, k = 0..N, as a read-only real vector."""
    if not 0 <= q <= N:
        raise ConfigError(f"x_overlap_row: q={q} outside 0..{N}")
    if method not in ("auto", "exact", "eigen"):
        raise ConfigError(f"x_overlap_row: unknown method {method!r}")
    if N > 100_000:  # 8 MB per row at N = 1e6; not worth pinning
        return _x_overlap_row_build(q, N, method)
    return _x_overlap_row_cached(q, N, method)


def x_overlap(q: int, k: int, N: int, method: str = "auto") -> float:
    """<q|^(x)|k>; real in this sign convention."""
    if not 0 <= k <= N:
        raise ConfigError(f"x_overlap: k={k} outside 0..{N}")
    return float(x_overlap_row(q, N, method)[k])


def x_overlap_matrix(N: int, method: str = "auto") -> np.ndarray:
    """Full (N+1)x(N+1) basis-change matrix U[q, k] = <q|^(x)|k>."""
    return np.vstack([x_overlap_row(q, N, method) for q in range(N + 1)])


_HALF_COS = (1.0, 0.0, -1.0, 0.0)  # cos(n pi / 2)
_HALF_SIN = (0.0, 1.0, 0.0, -1.0)


def _half_angle(alpha_phase: float) -> tuple[float, float]:
    """(cos, sin) of alpha/2 with exact zeros at integer multiples of pi."""
    r = alpha_phase / math.pi
    n = round(r)
    if r == n:
        return _HALF_COS[n % 4], _HALF_SIN[n % 4]
    return math.cos(alpha_phase / 2.0), math.sin(alpha_phase / 2.0)


def coherent_x_overlap(q: int, N: int, alpha_phase: float) -> complex:
    """Overlap of |q>^(x) with the equatorial state (e^{i alpha}/sqrt2, 1/sqrt2).

    Closed form i^(N-q) e^{i N alpha/2} sqrt(C(N,q)) cos^q(alpha/2)
    sin^(N-q)(alpha/2), evaluated in log space.  A vanishing cos or sin
    factor with positive exponent yields exact 0.
    """
    if not 0 <= q <= N:
        raise ConfigError(f"coherent_x_overlap: q={q} outside 0..{N}")
    c, s = _half_angle(alpha_phase)
    if (c == 0.0 and q > 0) or (s == 0.0 and N - q > 0):
        return 0.0 + 0.0j
    logmag = 0.5 * log_binomial(N, q)
    if q:
        logmag += q * math.log(abs(c))
    if N - q:
        logmag += (N - q) * math.log(abs(s))
    sign = 1.0
    if c < 0.0 and q % 2:
        sign = -sign
    if s < 0.0 and (N - q) % 2:
        sign = -sign
    theta = math.remainder(N * alpha_phase / 2.0, 2.0 * math.pi)
    return (1j ** ((N - q) % 4)) * sign * math.exp(logmag) * complex(
        math.cos(theta), math.sin(theta)
    )


def coherent_x_overlap_many(q: int, N: int, alpha_phases: np.ndarray) -> np.ndarray:
    """Vectorized coherent_x_overlap over an array of equatorial angles."""
    if not 0 <= q <= N:
        raise ConfigError(f"coherent_x_overlap_many: q={q} outside 0..{N}")
    alpha_phases = np.asarray(alpha_phases, dtype=float)
    out = np.empty(alpha_phases.shape, dtype=complex)
    for i, a in np.ndenumerate(alpha_phases):
        out[i] = coherent_x_overlap(q, N, float(a))
    return out


def coherent_x_overlap_core(
    q: int, N: int, alpha_phases: np.ndarray
) -> np.ndarray:
    """|coherent_x_overlap| with its real sign, phases stripped.

    Drops the unit factors i^(N-q) and e^{i N alpha/2}.  When alpha runs
    over (k - k') t + phi those factors split into a global phase times
    diagonal phases on k and k', so the stripped table supports any
    spectrum-derived quantity (singular values, entropy, negativity,
    outcome probability) at a fraction of the complex cost.
    """
    alpha_phases = np.asarray(alpha_phases, dtype=float)
    half = alpha_phases / 2.0
    c = np.cos(half)
    s = np.sin(half)
    r = alpha_phases / math.pi
    n = np.round(r)
    snap = r == n
    if np.any(snap):
        idx = n[snap].astype(np.int64) % 4
        c = c.copy()
        s = s.copy()
        c[snap] = np.asarray(_HALF_COS)[idx]
        s[snap] = np.asarray(_HALF_SIN)[idx]
    with np.errstate(divide="ignore"):
        lc = np.log(np.abs(c))
        ls = np.log(np.abs(s))
    logmag = 0.5 * log_binomial(N, q)
    logmag = logmag + (q * lc if q else 0.0) + ((N - q) * ls if N - q else 0.0)
    zero = ((c == 0.0) & (q > 0)) | ((s == 0.0) & (N - q > 0))
    sign = np.where((c < 0.0) & bool(q % 2), -1.0, 1.0) * np.where(
        (s < 0.0) & bool((N - q) % 2), -1.0, 1.0
    )
    mag = np.where(zero, 0.0, np.exp(np.where(zero, 0.0, logmag)))
    return sign * mag
