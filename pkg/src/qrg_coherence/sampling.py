"""Seeded random states and unitaries for property checks.

Eigenbases come from Jacobi diagonalization of random Hermitian matrices
with entries uniform in [-1, 1] + i[-1, 1]; spectra are normalized uniform
draws.
"""

from __future__ import annotations

import numpy as np

from .linalg import _jacobi


def random_hermitian(rng: np.random.Generator, dim: int, size: int) -> np.ndarray:
    shape = (size, dim, dim)
    a = rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)
    return (a + np.swapaxes(a.conj(), -1, -2)) / 2


def random_unitaries(rng: np.random.Generator, dim: int, size: int) -> np.ndarray:
    """``exp(iH)`` for random Hermitian H, built from its eigendecomposition."""
    w, v = _jacobi(random_hermitian(rng, dim, size))
    return (v * np.exp(1j * w)[:, None, :]) @ np.swapaxes(v.conj(), -1, -2)


def random_density_matrices(rng: np.random.Generator, dim: int, size: int) -> np.ndarray:
    _, v = _jacobi(random_hermitian(rng, dim, size))
    p = rng.uniform(0, 1, (size, dim))
    p /= p.sum(axis=1, keepdims=True)
    rho = (v * p[:, None, :]) @ np.swapaxes(v.conj(), -1, -2)
    return (rho + np.swapaxes(rho.conj(), -1, -2)) / 2
