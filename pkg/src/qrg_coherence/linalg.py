"""Dense Hermitian linear algebra for few-qubit registers.

Everything here works on plain ``numpy`` arrays of shape ``(..., d, d)``
(or ``(..., d)`` for state vectors), so a whole parameter grid can be pushed
through in one call. :class:`DensityMatrix` and :class:`PureState` are thin
validated wrappers for single states; every public function accepts them too
and hands back the same kind.

Site 1 is the most significant qubit: ``|100>`` is basis index 4.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadSubsystem, DimensionMismatch, InvalidState, NoConvergence, NonHermitian

OFFDIAG_TOL = 1e-13
MAX_SWEEPS = 500
HERMITIAN_TOL = 1e-10
NEGATIVE_EIGEN_TOL = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

def _qubit_dims(dim: int) -> tuple[int, ...]:
    n = int(dim).bit_length() - 1
    if dim < 1 or 2**n != dim:
        raise DimensionMismatch(f"dimension {dim} is not a power of two; pass dims explicitly")
    return (2,) * n


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigen-decomposition ``M = V diag(eigenvalues) V^dagger``, eigenvalues descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: tuple[int, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        dims = _qubit_dims(amp.size) if self.dims is None else tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != amp.size:
            raise DimensionMismatch(f"register {dims} does not match {amp.size} amplitudes")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > 1e-12:
            raise InvalidState(f"state norm is {norm!r}, expected 1")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def num_sites(self) -> int:
        return len(self.dims)

    def density_matrix(self) -> DensityMatrix:
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()), self.dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix over a register of sites."""

    matrix: np.ndarray
    dims: tuple[int, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got shape {m.shape}")
        dims = _qubit_dims(m.shape[0]) if self.dims is None else tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != m.shape[0]:
            raise DimensionMismatch(f"register {dims} does not match dimension {m.shape[0]}")
        asym = np.max(np.abs(m - m.conj().T))
        if asym > 1e-12:
            raise InvalidState(f"matrix is not Hermitian (max asymmetry {asym:.3g})")
        tr = np.trace(m)
        if abs(tr - 1.0) > 1e-10:
            raise InvalidState(f"trace is {tr!r}, expected 1")
        smallest = _jacobi(m, vectors=False)[0][..., -1]
        if smallest < -NEGATIVE_EIGEN_TOL:
            raise InvalidState(f"matrix has negative eigenvalue {smallest:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> DensityMatrix:
        d = int(np.prod(dims))
        return cls(np.eye(d) / d, tuple(dims))

    @classmethod
    def from_pure(cls, state: PureState | np.ndarray, dims: Sequence[int] | None = None) -> DensityMatrix:
        if not isinstance(state, PureState):
            state = PureState(state, dims)
        return state.density_matrix()

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_sites(self) -> int:
        return len(self.dims)


def basis_state(bits: str) -> PureState:
    """Computational basis qubit state from a label such as ``"010"``."""
    amp = np.zeros(2 ** len(bits), dtype=np.complex128)
    amp[int(bits, 2)] = 1.0
    return PureState(amp)


def _unwrap(rho, dims=None):
    """Return ``(array, dims, was_wrapped)`` for a DensityMatrix or raw array."""
    if isinstance(rho, DensityMatrix):
        return rho.matrix, rho.dims, True
    if isinstance(rho, PureState):
        return rho.density_matrix().matrix, rho.dims, True
    arr = np.asarray(rho, dtype=np.complex128)
    if dims is None:
        dims = _qubit_dims(arr.shape[-1])
    dims = tuple(int(d) for d in dims)
    if int(np.prod(dims)) != arr.shape[-1]:
        raise DimensionMismatch(f"register {dims} does not match dimension {arr.shape[-1]}")
    return arr, dims, False


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


# ---------------------------------------------------------------------------
# eigensolver
# ---------------------------------------------------------------------------

def _rotate(a: np.ndarray, v: np.ndarray | None, p: int, q: int) -> None:
    """One complex Jacobi rotation zeroing ``a[:, p, q]`` for every matrix in the batch."""
    apq = a[:, p, q]
    mag = np.abs(apq)
    live = mag > 0.0
    safe = np.where(live, mag, 1.0)
    phase = np.where(live, apq / safe, 1.0)
    theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
    t = np.where(theta >= 0.0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
    t = np.where(live, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on the (p, q) plane; A <- G^dagger A G
    cc = c[:, None]
    ss = s[:, None]
    sm = (s * phase.conj())[:, None]
    cm = (c * phase.conj())[:, None]
    sp = (s * phase)[:, None]
    cp_ = (c * phase)[:, None]

    colp = a[:, :, p].copy()
    colq = a[:, :, q]
    a[:, :, p] = cc * colp - sm * colq
    a[:, :, q] = ss * colp + cm * colq
    rowp = a[:, p, :].copy()
    rowq = a[:, q, :]
    a[:, p, :] = cc * rowp - sp * rowq
    a[:, q, :] = ss * rowp + cp_ * rowq
    a[:, p, q] = 0.0
    a[:, q, p] = 0.0
    if v is not None:
        colp = v[:, :, p].copy()
        colq = v[:, :, q]
        v[:, :, p] = cc * colp - sm * colq
        v[:, :, q] = ss * colp + cm * colq


def _jacobi(m, *, vectors: bool = True, tol: float = OFFDIAG_TOL, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi on a stack of Hermitian matrices; no symmetry check.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues sorted descending
    along the last axis (``eigenvectors`` is None when ``vectors=False``).
    """
    m = np.asarray(m, dtype=np.complex128)
    batch_shape, n = m.shape[:-2], m.shape[-1]
    a = m.reshape(-1, n, n).copy()
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy() if vectors else None
    scale = np.maximum(1.0, np.linalg.norm(a, axis=(1, 2)))
    offdiag = ~np.eye(n, dtype=bool)
    pairs = list(itertools.combinations(range(n), 2))

    for sweep in range(max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(a[:, offdiag]) ** 2, axis=1))
        active = np.flatnonzero(off >= tol * scale)
        if active.size == 0:
            break
        if sweep == max_sweeps:
            raise NoConvergence(
                f"off-diagonal norm {off.max():.3g} above {tol:g} after {max_sweeps} sweeps"
            )
        work = a[active]
        work_v = v[active] if vectors else None
        for p, q in pairs:
            _rotate(work, work_v, p, q)
        a[active] = work
        if vectors:
            v[active] = work_v

    w = np.real(np.diagonal(a, axis1=1, axis2=2))
    order = np.argsort(-w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1).reshape(*batch_shape, n)
    if vectors:
        v = np.take_along_axis(v, order[:, None, :], axis=2).reshape(*batch_shape, n, n)
    return w, v


def _check_hermitian(m: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    asym = float(np.max(np.abs(m - np.swapaxes(m.conj(), -1, -2)))) if m.size else 0.0
    if asym > HERMITIAN_TOL * scale:
        raise NonHermitian(f"matrix is not Hermitian (max asymmetry {asym:.3g})")


def hermitian_eig(m) -> Spectrum:
    """Eigen-decomposition of one Hermitian matrix by cyclic Jacobi rotations.

    Raises NonHermitian when ``m`` is not Hermitian to within 1e-10, and
    NoConvergence if 500 sweeps do not bring the off-diagonal Frobenius norm
    below 1e-13.
    """
    if isinstance(m, DensityMatrix):
        m = m.matrix
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > 64:
        raise DimensionMismatch("hermitian_eig is meant for dimensions up to 64")
    _check_hermitian(m)
    w, v = _jacobi(m)
    return Spectrum(w, v)


def eigvalsh(m) -> np.ndarray:
    """Descending eigenvalues of a stack of Hermitian matrices ``(..., d, d)``."""
    m = np.asarray(m, dtype=np.complex128)
    _check_hermitian(m)
    return _jacobi(m, vectors=False)[0]


# ---------------------------------------------------------------------------
# entropy, tensor products, partial traces
# ---------------------------------------------------------------------------

def entropy_from_eigenvalues(w) -> np.ndarray | float:
    w = np.asarray(w, dtype=float)
    if np.any(w < -NEGATIVE_EIGEN_TOL) or np.any(w > 1.0 + NEGATIVE_EIGEN_TOL):
        raise InvalidState(f"eigenvalues outside [0, 1]: min {w.min():.3g}, max {w.max():.3g}")
    w = np.clip(w, 0.0, 1.0)
    safe = np.where(w > 0.0, w, 1.0)
    return _scalar(-np.sum(w * np.log2(safe), axis=-1))


def von_neumann_entropy(rho) -> float | np.ndarray:
    """``S(rho) = -Tr rho log2 rho`` in bits, for one state or a stack of them."""
    arr, _, _ = _unwrap(rho)
    return entropy_from_eigenvalues(_jacobi(arr, vectors=False)[0])


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product over the last two axes, broadcasting any batch axes."""
    a = np.asarray(a)
    b = np.asarray(b)
    ra, ca = a.shape[-2:]
    rb, cb = b.shape[-2:]
    out = a[..., :, None, :, None] * b[..., None, :, None, :]
    return out.reshape(*out.shape[:-4], ra * rb, ca * cb)


def tensor_product(a, b):
    """Tensor product of two density matrices or two pure states."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(kron(a.matrix, b.matrix), a.dims + b.dims)
    if isinstance(a, (PureState, DensityMatrix)) or isinstance(b, (PureState, DensityMatrix)):
        raise TypeError("tensor_product operands must be of the same kind")
    return kron(a, b)


def _check_sites(keep, n: int) -> list[int]:
    keep = [int(k) for k in keep]
    if not keep:
        raise BadSubsystem("at least one subsystem must be kept")
    for k in keep:
        if not 0 <= k < n:
            raise BadSubsystem(f"subsystem index {k} out of range for {n} sites")
    if len(set(keep)) != len(keep):
        raise BadSubsystem(f"repeated subsystem index in {keep}")
    return keep


def partial_trace(rho, keep: Sequence[int], dims: Sequence[int] | None = None):
    """Reduced state on the sites in ``keep`` (0-based), in their original order.

    ``keep`` is sorted before use, so ``keep=[2, 0]`` gives the state on sites
    0 and 2 in register order.
    """
    arr, dims, wrapped = _unwrap(rho, dims)
    n = len(dims)
    keep = sorted(_check_sites(keep, n))
    batch = arr.shape[:-2]
    t = arr.reshape(*batch, *dims, *dims)
    rows = list(range(n))
    cols = [n + i if i in keep else i for i in range(n)]
    out_idx = [i for i in keep] + [n + i for i in keep]
    red = np.einsum(t, [Ellipsis, *rows, *cols], [Ellipsis, *out_idx])
    k = int(np.prod([dims[i] for i in keep]))
    red = red.reshape(*batch, k, k)
    if wrapped:
        return DensityMatrix(red, tuple(dims[i] for i in keep))
    return red


def permute_sites(rho, order: Sequence[int], dims: Sequence[int] | None = None):
    """Reorder subsystems so that new site ``j`` is old site ``order[j]``."""
    arr, dims, wrapped = _unwrap(rho, dims)
    n = len(dims)
    order = _check_sites(order, n)
    if len(order) != n:
        raise BadSubsystem("order must list every site exactly once")
    batch = arr.shape[:-2]
    nb = len(batch)
    t = arr.reshape(*batch, *dims, *dims)
    axes = list(range(nb)) + [nb + i for i in order] + [nb + n + i for i in order]
    new_dims = tuple(dims[i] for i in order)
    out = np.transpose(t, axes).reshape(arr.shape)
    if wrapped:
        return DensityMatrix(out, new_dims)
    return out


def operator_on_sites(ops: dict[int, np.ndarray], n: int) -> np.ndarray:
    """``op_0 (x) op_1 (x) ...`` with identities on the sites missing from ``ops``."""
    out = np.ones((1, 1), dtype=np.complex128)
    for site in range(n):
        out = np.kron(out, ops.get(site, IDENTITY_2))
    return out
