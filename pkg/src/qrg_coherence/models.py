"""Block ground states and renormalization flows for two Ising-type chains.

``itf``: transverse-field Ising chain, two-site blocks, coupling g.
``dm``:  Ising chain with Dzyaloshinskii-Moriya exchange along z, three-site
blocks, coupling D.

Flows are closed-form maps. The block Hamiltonians are only here to check the
closed-form ground states numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from .errors import InvalidParam, NoSignChange
from .linalg import PAULI_X, PAULI_Y, PAULI_Z, PureState, operator_on_sites

ITF = "itf"
DM = "dm"
MODELS = (ITF, DM)
BLOCK_SIZE = {ITF: 2, DM: 3}

# couplings beyond these are frozen to the exact limits inf / 0
ASYMPTOTIC = 1e8
VANISHING = 1e-8
MAX_DEPTH = 64

# J_{k+1}/J_k in the frozen limits, g or D -> 0 and -> inf
_LIMIT_RATIO = {ITF: {"zero": 1.0, "inf": 0.0}, DM: {"zero": 1.0, "inf": 0.25}}


def _check_model(model: str) -> str:
    if model not in MODELS:
        raise InvalidParam(f"unknown model {model!r}; expected one of {MODELS}")
    return model


# ---------------------------------------------------------------------------
# transverse-field Ising
# ---------------------------------------------------------------------------

def itf_flow_step(g):
    """One renormalization step: ``(g**2, J'/J)`` with ``J'/J = 2s/(1+s**2)``, s = sqrt(g**2+1)+g."""
    s = np.sqrt(g * g + 1.0) + g
    return g * g, 2.0 * s / (1.0 + s * s)


def itf_flow_derivative(g):
    return 2.0 * g


def itf_amplitudes(g, which: int = 0) -> np.ndarray:
    """Ground-state amplitudes for an array of couplings; ``g = inf`` gives the product limit."""
    g = np.asarray(g, dtype=float)
    finite = np.isfinite(g)
    gs = np.where(finite, g, 0.0)
    s = np.sqrt(gs * gs + 1.0) + gs
    norm = np.sqrt(s * s + 1.0)
    alpha = np.where(finite, s / norm, 1.0)
    beta = np.where(finite, 1.0 / norm, 0.0)
    out = np.zeros(g.shape + (4,), dtype=np.complex128)
    if which == 0:
        out[..., 0b00], out[..., 0b11] = alpha, beta
    else:
        out[..., 0b01], out[..., 0b10] = alpha, beta
    return out


def itf_ground_state(g: float, which: int = 0) -> PureState:
    """``alpha|00> + beta|11>`` (or the partner ``alpha|01> + beta|10>`` for ``which=1``).

    ``g = math.inf`` is the asymptotic flag and returns ``|00>`` exactly.
    """
    if which not in (0, 1):
        raise InvalidParam("which must be 0 or 1")
    if not g >= 0:
        raise InvalidParam(f"transverse field must be >= 0, got {g}")
    return PureState(itf_amplitudes(g, which))


def itf_block_hamiltonian(J: float, g: float) -> np.ndarray:
    """``-J (X (x) X + g Z (x) 1)`` on a two-site block.

    This is the field-on-one-site block written in the rotated frame in which
    :func:`itf_ground_state` is its exact, doubly degenerate ground state with
    energy ``-J sqrt(1 + g**2)``.
    """
    xx = operator_on_sites({0: PAULI_X, 1: PAULI_X}, 2)
    z1 = operator_on_sites({0: PAULI_Z}, 2)
    return -J * (xx + g * z1)


# ---------------------------------------------------------------------------
# Ising with Dzyaloshinskii-Moriya interaction
# ---------------------------------------------------------------------------

def dm_q(D):
    """q = sqrt(1 + 8 D**2)."""
    return np.sqrt(1.0 + 8.0 * D * D)


def uncorrected_q(D):
    """The reciprocal form 1/sqrt(1 + 8 D**2); kept only as a negative control."""
    return 1.0 / np.sqrt(1.0 + 8.0 * D * D)


def dm_flow_step(D, q_of: Callable = dm_q):
    """One renormalization step: ``(16 D**3 / (1+q)**2, ((1+q)/(2q))**2)``."""
    q = q_of(D)
    return 16.0 * D**3 / (1.0 + q) ** 2, ((1.0 + q) / (2.0 * q)) ** 2


def dm_flow_derivative(D):
    """dD'/dD = 48 D**2/(1+q)**2 - 256 D**4/(q (1+q)**3)."""
    q = dm_q(D)
    return 48.0 * D * D / (1.0 + q) ** 2 - 256.0 * D**4 / (q * (1.0 + q) ** 3)


def dm_amplitudes(D, which: int = 0) -> np.ndarray:
    """Ground-state amplitudes for an array of couplings.

    ``D = inf`` gives ``(|100> + i sqrt2 |010> - |001>)/2``; ``D = 0`` gives
    ``i|010>`` (the formula's own limit).
    """
    D = np.asarray(D, dtype=float)
    finite = np.isfinite(D)
    Ds = np.where(finite, D, 0.0)
    q = dm_q(Ds)
    norm = np.sqrt(2.0 * q * (1.0 + q))
    side = np.where(finite, 2.0 * Ds / norm, 0.5)
    middle = np.where(finite, (1.0 + q) / norm, 1.0 / math.sqrt(2.0))
    out = np.zeros(D.shape + (8,), dtype=np.complex128)
    if which == 0:
        out[..., 0b100], out[..., 0b010], out[..., 0b001] = side, 1j * middle, -side
    else:
        out[..., 0b110], out[..., 0b101], out[..., 0b011] = side, 1j * middle, -side
    return out


def dm_ground_state(D: float, which: int = 0, *, allow_zero: bool = False) -> PureState:
    """One of the two degenerate three-site block ground states.

    ``which=0`` lives in the one-up-spin sector (|100>, |010>, |001>) and
    ``which=1`` in the two-up-spin sector. ``D = math.inf`` returns the
    asymptotic limit state. At ``D = 0`` the state collapses to ``i|010>``;
    that only happens on the frozen zero side of a flow, so it must be asked
    for with ``allow_zero=True``.
    """
    if which not in (0, 1):
        raise InvalidParam("which must be 0 or 1")
    if not D >= 0:
        raise InvalidParam(f"DM coupling must be >= 0, got {D}")
    if D == 0 and not allow_zero:
        raise InvalidParam("D = 0 degenerates to a product state; pass allow_zero=True")
    return PureState(dm_amplitudes(D, which))


def dm_block_hamiltonian(J: float, D: float) -> np.ndarray:
    """``(J/4)[Z1Z2 + Z2Z3 + D(X1Y2 - Y1X2 + X2Y3 - Y2X3)]`` on a three-site block.

    Built with ``|1>`` as spin up (Z|1> = +|1>, so Y changes sign relative to
    the usual matrices). In that frame :func:`dm_ground_state` is an exact,
    doubly degenerate ground state with energy ``-(J/4)(1+q)``.
    """
    x, y, z = PAULI_X, -PAULI_Y, -PAULI_Z

    def pair(a, b, i, j):
        return operator_on_sites({i: a, j: b}, 3)

    zz = pair(z, z, 0, 1) + pair(z, z, 1, 2)
    dm = pair(x, y, 0, 1) - pair(y, x, 0, 1) + pair(x, y, 1, 2) - pair(y, x, 1, 2)
    return (J / 4.0) * (zz + D * dm)


# ---------------------------------------------------------------------------
# model-generic flow utilities
# ---------------------------------------------------------------------------

def flow_step(model: str, x, **kwargs):
    """``(x_next, J_next/J)`` for either model."""
    if _check_model(model) == ITF:
        return itf_flow_step(x)
    return dm_flow_step(x, **kwargs)


def flow_derivative(model: str, x):
    return itf_flow_derivative(x) if _check_model(model) == ITF else dm_flow_derivative(x)


def block_amplitudes(model: str, x, which: int = 0) -> np.ndarray:
    """Block ground-state amplitudes for an array of (possibly frozen) couplings."""
    return itf_amplitudes(x, which) if _check_model(model) == ITF else dm_amplitudes(x, which)


def block_ground_state(model: str, x: float, which: int = 0) -> PureState:
    """Block ground state at coupling ``x``, where ``inf`` and ``0`` are the frozen limits."""
    if _check_model(model) == ITF:
        return itf_ground_state(x, which)
    return dm_ground_state(x, which, allow_zero=True)


def block_dims(model: str) -> tuple[int, ...]:
    return (2,) * BLOCK_SIZE[_check_model(model)]


@dataclass(frozen=True)
class FlowTrajectory:
    """Couplings x_0..x_n and strengths J_0..J_n (J_0 = 1) under repeated renormalization.

    ``frozen`` is ``"inf"`` or ``"zero"`` once a coupling left
    ``[VANISHING, ASYMPTOTIC]``; from ``frozen_at`` on the coupling is held at
    the exact limit (``math.inf`` or ``0.0``).
    """

    model: str
    couplings: tuple[float, ...]
    strengths: tuple[float, ...]
    frozen: str | None = None
    frozen_at: int | None = None

    @property
    def block_size(self) -> int:
        return BLOCK_SIZE[self.model]

    @property
    def depth(self) -> int:
        return len(self.couplings) - 1

    @property
    def final(self) -> float:
        return self.couplings[-1]

    def system_size(self, k: int | None = None) -> int:
        """Number of sites represented after ``k`` steps, ``b**(k+1)``."""
        k = self.depth if k is None else k
        return self.block_size ** (k + 1)


def _freeze(x: float) -> tuple[float, str | None]:
    if x > ASYMPTOTIC:
        return math.inf, "inf"
    if x < VANISHING:
        return 0.0, "zero"
    return x, None


def iterate_flow(model: str, x0: float, n: int) -> FlowTrajectory:
    _check_model(model)
    if not x0 >= 0:
        raise InvalidParam(f"starting coupling must be >= 0, got {x0}")
    if not 0 <= n <= MAX_DEPTH:
        raise InvalidParam(f"depth must be in [0, {MAX_DEPTH}], got {n}")
    x, flag = _freeze(float(x0))
    frozen_at = 0 if flag else None
    J = 1.0
    couplings, strengths = [x], [J]
    for k in range(1, n + 1):
        if flag is None:
            x_next, ratio = flow_step(model, x)
            x, flag = _freeze(float(x_next))
            if flag:
                frozen_at = k
        else:
            ratio = _LIMIT_RATIO[model][flag]
        J *= float(ratio)
        couplings.append(x)
        strengths.append(J)
    return FlowTrajectory(model, tuple(couplings), tuple(strengths), flag, frozen_at)


def find_fixed_point(model: str, bracket: tuple[float, float] = (0.5, 2.0), **kwargs) -> float:
    """Root of ``flow_step(x) - x`` inside ``bracket`` by bisection (|hi - lo| <= 1e-12)."""
    _check_model(model)
    lo, hi = bracket

    def residual(x):
        return float(flow_step(model, x, **kwargs)[0]) - x

    if residual(lo) * residual(hi) > 0:
        raise NoSignChange(f"flow_step(x) - x does not change sign on {bracket}")
    return bisect(residual, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps, maxiter=200)
