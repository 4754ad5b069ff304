"""Built-in consistency suite behind the selftest subcommand.

Each check exercises a dual route (closed form vs brute force, analytic
vs integrator) or an algebraic identity at fixed small sizes, and
returns its worst deviation so a failing build points at the broken
layer directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import chain, dephasing, dicke, entanglement


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_unitarity() -> CheckResult:
    worst = 0.0
    for N in (24, 80):  # one exact-path size, one eigenvector-path size
        U = dicke.x_overlap_matrix(N)
        worst = max(worst, float(np.max(np.abs(U @ U.T - np.eye(N + 1)))))
    return CheckResult("x-overlap-unitarity", worst <= 1e-10, f"max |UU^T - I| = {worst:.3e}")


def _check_dual_path() -> CheckResult:
    N = 40
    worst = 0.0
    for q in range(N + 1):
        d = np.max(
            np.abs(
                dicke._x_overlap_row_build(q, N, "exact")
                - dicke._x_overlap_row_build(q, N, "eigen")
            )
        )
        worst = max(worst, float(d))
    return CheckResult("x-overlap-dual-path", worst <= 1e-10, f"N=40 exact vs eigen: {worst:.3e}")


def _check_coherent_norm() -> CheckResult:
    worst = 0.0
    for N in (5, 50, 500):
        amps = dicke.coherent_dicke_amplitudes(
            N, dicke.CoherentParams.equatorial(0.4), dicke.make_window(N, math.inf)
        )
        worst = max(worst, abs(float(np.sum(np.abs(amps) ** 2)) - 1.0))
    return CheckResult("coherent-normalization", worst <= 1e-12, f"|sum - 1| = {worst:.3e}")


def _check_coherent_contraction() -> CheckResult:
    N, q, alpha = 20, 13, 0.7
    amps = dicke.coherent_dicke_amplitudes(
        N, dicke.CoherentParams.equatorial(alpha), dicke.make_window(N, math.inf)
    )
    want = np.dot(dicke.x_overlap_row(q, N), amps)
    got = dicke.coherent_x_overlap(q, N, alpha)
    err = abs(got - want)
    return CheckResult("coherent-x-contraction", err <= 1e-10, f"|closed - sum| = {err:.3e}")


def _check_closed_form_oracle() -> CheckResult:
    worst = 0.0
    for M in (3, 4):
        cfg = chain.chain_config(N=3, M=M, t=0.7, phi=0.1)
        A = chain.closed_form_amplitudes(cfg).dense()
        ref = chain.project_intermediates(
            chain.exact_evolve(cfg), cfg.outcomes, cfg.phi
        ).dense()
        worst = max(worst, float(np.max(np.abs(A - ref))))
    return CheckResult("closed-form-oracle", worst <= 1e-10, f"entrywise gap = {worst:.3e}")


def _check_completeness() -> CheckResult:
    N = 3
    total = 0.0
    for q in range(N + 1):
        cfg = chain.chain_config(N=N, M=3, t=0.9, outcomes=(q,))
        total += chain.closed_form_amplitudes(cfg).p_q
    err = abs(total - 1.0)
    return CheckResult("probability-completeness", err <= 1e-10, f"|sum p_q - 1| = {err:.3e}")


def _check_dephasing_oracle() -> CheckResult:
    win = dicke.make_window(2, math.inf)
    params = dephasing.DephasingParams(gamma=0.05, t=0.8)
    rng = np.random.default_rng(7)
    dim = win.size**2
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho0 = X @ X.conj().T
    rho0 /= np.trace(rho0).real
    got = dephasing.analytic_dephased_rho(rho0, params, win, 2)
    ref = dephasing.rk4_lindblad(rho0, params, win, 2, dt=2e-4)
    err = float(np.max(np.abs(got - ref)))
    return CheckResult("dephasing-oracle", err <= 1e-8, f"analytic vs RK4 = {err:.3e}")


def _check_gamma_zero() -> CheckResult:
    cfg = chain.chain_config(N=6, M=3, t=0.9)
    rho, p_q, _ = dephasing.dephased_end_to_end(cfg, dephasing.DephasingParams(0.0, 0.9))
    A = chain.closed_form_amplitudes(cfg)
    vec = A.dense().reshape(-1)
    ref = np.outer(vec, vec.conj()) / A.p_q
    err = float(np.max(np.abs(rho - ref)))
    return CheckResult("gamma-zero-consistency", err <= 1e-8, f"rho gap = {err:.3e}")


def _check_periodicity() -> CheckResult:
    worst = 0.0
    for t in (0.3, 1.1):
        vals = []
        for tt in (t, t + 2 * math.pi):
            cfg = chain.chain_config(N=3, M=3, t=tt)
            A = chain.project_intermediates(chain.exact_evolve(cfg), cfg.outcomes, 0.0)
            vals.append(entanglement.schmidt_entropy(A).E)
        worst = max(worst, abs(vals[0] - vals[1]))
    return CheckResult("periodicity", worst <= 1e-9, f"|E(t) - E(t + 2pi)| = {worst:.3e}")


ALL_CHECKS = (
    _check_unitarity,
    _check_dual_path,
    _check_coherent_norm,
    _check_coherent_contraction,
    _check_closed_form_oracle,
    _check_completeness,
    _check_dephasing_oracle,
    _check_gamma_zero,
    _check_periodicity,
)


def run_all() -> list[CheckResult]:
    return [fn() for fn in ALL_CHECKS]
