"""Square-root quantum Jensen-Shannon coherence and its decomposition.

All entropies are in bits. The total coherence of a d-dimensional state is
its distance to I/d, local coherence is the distance from the product of
marginals to I/d, and collective coherence is the distance from the state to
the product of its marginals. Functions accept a :class:`DensityMatrix` (and
return floats) or raw ``(..., d, d)`` arrays (and return arrays).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadPartition, DimensionMismatch, InvalidState, TradeoffViolation
from .linalg import (
    DensityMatrix,
    _jacobi,
    _scalar,
    _unwrap,
    entropy_from_eigenvalues,
    kron,
    partial_trace,
    permute_sites,
)

RADICAND_TOL = 1e-10
TRADEOFF_TOL = 1e-9


@dataclass(frozen=True)
class CoherenceTriple:
    total: float
    local: float
    collective: float

    def __iter__(self):
        return iter((self.total, self.local, self.collective))


@dataclass(frozen=True)
class MonogamyReport:
    """Pairwise cuts ``"1:n"``, the head cut ``1 : 2..N`` and ``M = sum(pairwise) - headcut``."""

    pairwise: dict[str, float]
    headcut: float
    M: float

    @property
    def polygamous(self) -> bool:
        return self.M > 0


def _entropy(m: np.ndarray) -> np.ndarray:
    return entropy_from_eigenvalues(_jacobi(m, vectors=False)[0])


def _clamp_radicand(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < -RADICAND_TOL):
        raise InvalidState(f"Jensen-Shannon divergence came out negative ({t.min():.3g})")
    return np.clip(t, 0.0, None)


def _qjsd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    stacked = np.stack(np.broadcast_arrays(a, (a + b) / 2, b))
    s_a, s_mid, s_b = _entropy(stacked)
    return _clamp_radicand(s_mid - (s_a + s_b) / 2)


def _qjsd_to_maximally_mixed(w: np.ndarray) -> np.ndarray:
    """Divergence from I/d given only the spectrum ``w`` of the other state.

    (X + I/d)/2 shares eigenvectors with X, so its spectrum is (w + 1/d)/2.
    """
    d = w.shape[-1]
    mid = entropy_from_eigenvalues((np.clip(w, 0.0, None) + 1.0 / d) / 2)
    return _clamp_radicand(mid - (entropy_from_eigenvalues(w) + np.log2(d)) / 2)


def _check_pair(rho, sigma):
    a, dims_a, wrapped = _unwrap(rho)
    b, dims_b, _ = _unwrap(sigma)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionMismatch(f"cannot compare dimensions {a.shape[-1]} and {b.shape[-1]}")
    return a, b, wrapped


def qjsd(rho, sigma) -> float | np.ndarray:
    """Quantum Jensen-Shannon divergence ``S((rho+sigma)/2) - (S(rho)+S(sigma))/2``."""
    a, b, _ = _check_pair(rho, sigma)
    return _scalar(_qjsd(a, b))


def coherence_distance(rho, sigma) -> float | np.ndarray:
    """Square root of the QJSD; a metric on density matrices with values in [0, 1]."""
    a, b, _ = _check_pair(rho, sigma)
    return _scalar(np.sqrt(_qjsd(a, b)))


# ---------------------------------------------------------------------------
# product states over groups of sites
# ---------------------------------------------------------------------------

def _check_partition(partition: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    groups = [sorted(int(i) for i in g) for g in partition]
    flat = [i for g in groups for i in g]
    if any(not g for g in groups):
        raise BadPartition("partition groups must be non-empty")
    if sorted(flat) != list(range(n)):
        raise BadPartition(f"partition {partition} must split sites 0..{n - 1} into disjoint groups")
    return groups


def _product_over_groups(arr: np.ndarray, dims: tuple[int, ...], groups: list[list[int]]) -> np.ndarray:
    out = partial_trace(arr, groups[0], dims)
    for g in groups[1:]:
        out = kron(out, partial_trace(arr, g, dims))
    order = [i for g in groups for i in g]
    if order != sorted(order):
        # kron leaves sites in group order; put them back in register order
        inverse = list(np.argsort(order))
        out = permute_sites(out, inverse, tuple(dims[i] for i in order))
    return out


def product_of_marginals(rho, dims: Sequence[int] | None = None):
    """Tensor product of the single-site reduced states, in register order."""
    arr, dims, wrapped = _unwrap(rho, dims)
    pi = _product_over_groups(arr, dims, [[i] for i in range(len(dims))])
    return DensityMatrix(pi, dims) if wrapped else pi


def _marginal_spectrum(arr: np.ndarray, dims: tuple[int, ...]) -> np.ndarray:
    """Spectrum of the product of marginals: all products of single-site eigenvalues."""
    w = None
    for i in range(len(dims)):
        wi = _jacobi(partial_trace(arr, [i], dims), vectors=False)[0]
        w = wi if w is None else (w[..., :, None] * wi[..., None, :]).reshape(*wi.shape[:-1], -1)
    return w


# ---------------------------------------------------------------------------
# total, local, collective
# ---------------------------------------------------------------------------

def total_coherence(rho, dims: Sequence[int] | None = None):
    """Distance from ``rho`` to the maximally mixed state of the same dimension."""
    arr, _, _ = _unwrap(rho, dims)
    return _scalar(np.sqrt(_qjsd_to_maximally_mixed(_jacobi(arr, vectors=False)[0])))


def local_coherence(rho, dims: Sequence[int] | None = None):
    """Distance from the product of marginals to I/d."""
    arr, dims, _ = _unwrap(rho, dims)
    return _scalar(np.sqrt(_qjsd_to_maximally_mixed(_marginal_spectrum(arr, dims))))


def cut_coherence(rho, partition: Sequence[Sequence[int]], dims: Sequence[int] | None = None):
    """Distance from ``rho`` to the product of the reduced states of each group.

    ``partition`` lists disjoint groups of 0-based site indices that cover the
    register, e.g. ``[[0], [1, 2]]`` for the cut 1 : 23.
    """
    arr, dims, _ = _unwrap(rho, dims)
    groups = _check_partition(partition, len(dims))
    return _scalar(np.sqrt(_qjsd(arr, _product_over_groups(arr, dims, groups))))


def collective_coherence(rho, dims: Sequence[int] | None = None):
    """Distance from ``rho`` to the product of its marginals."""
    arr, dims, _ = _unwrap(rho, dims)
    return cut_coherence(arr, [[i] for i in range(len(dims))], dims)


def coherence_arrays(rho, dims: Sequence[int] | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(total, local, collective)`` for a stack of states, with the trade-off asserted.

    This is the batched kernel behind :func:`coherence_triple`; it shares the
    spectra of ``rho`` and of the product of marginals between the three terms.
    """
    arr, dims, _ = _unwrap(rho, dims)
    pi = _product_over_groups(arr, dims, [[i] for i in range(len(dims))])
    w_rho = _jacobi(arr, vectors=False)[0]
    total = np.sqrt(_qjsd_to_maximally_mixed(w_rho))
    local = np.sqrt(_qjsd_to_maximally_mixed(_marginal_spectrum(arr, dims)))
    collective = np.sqrt(_qjsd(arr, pi))
    excess = total - (local + collective)
    if np.any(excess > TRADEOFF_TOL):
        raise TradeoffViolation(f"total exceeds local + collective by {excess.max():.3g}")
    return total, local, collective


def coherence_triple(rho, dims: Sequence[int] | None = None) -> CoherenceTriple:
    total, local, collective = coherence_arrays(rho, dims)
    return CoherenceTriple(float(total), float(local), float(collective))


# ---------------------------------------------------------------------------
# multipartite bookkeeping
# ---------------------------------------------------------------------------

def monogamy(rho, dims: Sequence[int] | None = None) -> MonogamyReport:
    """Sum of the pairwise cuts ``1:n`` minus the cut ``1 : 2..N``; ``M > 0`` is polygamous."""
    arr, dims, _ = _unwrap(rho, dims)
    n = len(dims)
    if n < 3:
        raise BadPartition("monogamy needs at least three sites")
    pairwise = {}
    for k in range(1, n):
        pair_dims = (dims[0], dims[k])
        reduced = partial_trace(arr, [0, k], dims)
        pairwise[f"1:{k + 1}"] = float(cut_coherence(reduced, [[0], [1]], pair_dims))
    headcut = float(cut_coherence(arr, [[0], list(range(1, n))], dims))
    return MonogamyReport(pairwise, headcut, sum(pairwise.values()) - headcut)


def tripartite_bound_check(rho, dims: Sequence[int] | None = None) -> tuple[float, float, bool]:
    """``C_123`` against ``C_1 + C_2 + C_3 + C_{2:3} + C_{1:23}``; returns ``(lhs, rhs, holds)``."""
    arr, dims, _ = _unwrap(rho, dims)
    if len(dims) != 3:
        raise BadPartition("the tripartite bound needs exactly three sites")
    lhs = float(total_coherence(arr, dims))
    singles = sum(float(total_coherence(partial_trace(arr, [i], dims), (dims[i],))) for i in range(3))
    c23 = float(cut_coherence(partial_trace(arr, [1, 2], dims), [[0], [1]], dims[1:]))
    c1_23 = float(cut_coherence(arr, [[0], [1, 2]], dims))
    rhs = singles + c23 + c1_23
    return lhs, rhs, lhs <= rhs + TRADEOFF_TOL
