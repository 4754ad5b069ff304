"""Shared test helpers: literal reference formulas kept independent of
the package implementation."""

import math

import numpy as np
import pytest


def double_sum_x_overlap(q: int, k: int, N: int) -> float:
    """Textbook double-sum form of <q|^(x)|k>, transcribed literally.

    Stable only for small N (float cancellation grows with N); used as
    an oracle below N ~ 30.
    """
    total = 0.0
    for l in range(q + 1):
        for m in range(N - q + 1):
            if l + m != k:
                continue
            total += (
                math.comb(q, l)
                * math.comb(N - q, m)
                * (-1.0) ** (N - q - m)
                * math.sqrt(math.factorial(l + m) * math.factorial(N - l - m))
            )
    return total / math.sqrt(
        math.factorial(q) * math.factorial(N - q) * 2.0**N
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20250814)


def random_density(rng, dim: int) -> np.ndarray:
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = X @ X.conj().T
    return rho / np.trace(rho).real
