"""Coherence along the renormalization flow: sweeps, derivatives, scaling fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import linregress

from .coherence import coherence_arrays
from .errors import FlowSaturated, InvalidParam
from .models import (
    ASYMPTOTIC,
    BLOCK_SIZE,
    VANISHING,
    block_amplitudes,
    block_dims,
    flow_derivative,
    flow_step,
    iterate_flow,
)

MAX_SWEEP_DEPTH = 40
DEFAULT_WINDOW = (0.8, 1.2)
DEFAULT_POINTS = 2001
DEFAULT_DEPTHS = tuple(range(2, 9))
REL_STEP = 1e-6

COLLECTIVE = "collective"
LOCAL = "local"


@dataclass(frozen=True)
class SweepRecord:
    param: float
    n_steps: int
    effective_param: float  # math.inf / 0.0 when the flow froze
    total: float
    local: float
    collective: float


@dataclass(frozen=True)
class DerivativeRecord:
    """dC/dx with respect to the bare coupling; NaN marks a saturated flow."""

    param: float
    n_steps: int
    d_collective: float
    d_local: float


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares line through ``(ln N, ln |dC/dx|)``; the slope is theta."""

    points: tuple[tuple[float, float], ...]
    theta: float
    intercept: float
    r_squared: float
    depths: tuple[int, ...] = ()
    x_stars: tuple[float, ...] = field(default=())

    @property
    def nu(self) -> float:
        return 1.0 / self.theta


def _density(amps: np.ndarray) -> np.ndarray:
    return amps[..., :, None] * amps.conj()[..., None, :]


def _triples(model: str, x: np.ndarray):
    return coherence_arrays(_density(block_amplitudes(model, x)), block_dims(model))


def sweep(model: str, param_grid: Iterable[float], n_steps: int) -> list[SweepRecord]:
    """Coherence of the block ground state after ``n_steps`` renormalizations of each grid value."""
    if not 0 <= n_steps <= MAX_SWEEP_DEPTH:
        raise InvalidParam(f"n_steps must be in [0, {MAX_SWEEP_DEPTH}]")
    grid = [float(x) for x in param_grid]
    effective = np.array([iterate_flow(model, x, n_steps).final for x in grid])
    total, local, collective = _triples(model, effective)
    return [
        SweepRecord(x, n_steps, float(e), float(c), float(cl), float(cc))
        for x, e, c, cl, cc in zip(grid, effective, total, local, collective)
    ]


def _representable(x: np.ndarray) -> np.ndarray:
    return (x >= VANISHING) & (x <= ASYMPTOTIC)


def derivative_profile(model: str, xs, n_steps: int, h: float = REL_STEP) -> tuple[np.ndarray, np.ndarray]:
    """``(dC_collective/dx, dC_local/dx)`` at every bare coupling in ``xs``.

    Chain rule along the trajectory: a central difference in the effective
    coupling x_n, with step ``h * max(1, x_n)`` (at most ``1e-3 * x_n``), times
    the product of flow derivatives f'(x_k), k < n. Points whose trajectory
    leaves [1e-8, 1e8] come back as NaN.
    """
    x = np.array(xs, dtype=float)
    ok = np.ones(x.shape, dtype=bool)
    factor = np.ones_like(x)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n_steps):
            ok &= _representable(x)
            x = np.where(ok, x, 1.0)
            factor = factor * flow_derivative(model, x)
            x = flow_step(model, x)[0]
        ok &= _representable(x)
    x = np.where(ok, x, 1.0)
    step = np.minimum(h * np.maximum(1.0, x), 1e-3 * x)
    both = np.concatenate([x + step, x - step])
    _, local, collective = _triples(model, both)
    m = x.size
    scale = factor / (2 * step)
    d_coll = (collective[:m] - collective[m:]) * scale
    d_local = (local[:m] - local[m:]) * scale
    d_coll[~ok] = np.nan
    d_local[~ok] = np.nan
    return d_coll, d_local


def derivative_along_flow(model: str, x: float, n_steps: int, h: float = REL_STEP) -> DerivativeRecord:
    d_coll, d_local = derivative_profile(model, [x], n_steps, h)
    if np.isnan(d_coll[0]):
        raise FlowSaturated(f"the {model} flow from {x} freezes within {n_steps} steps")
    return DerivativeRecord(float(x), n_steps, float(d_coll[0]), float(d_local[0]))


def chain_factor(model: str, x: float, n_steps: int) -> float:
    """Product of the flow derivatives f'(x_k) for k = 0..n-1."""
    traj = iterate_flow(model, x, n_steps)
    if traj.frozen_at is not None and traj.frozen_at <= n_steps:
        raise FlowSaturated(f"the {model} flow from {x} freezes at step {traj.frozen_at}")
    return math.prod(float(flow_derivative(model, xk)) for xk in traj.couplings[:-1])


def refine_peak(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Maximum of sampled ``ys`` refined by a parabola through the best sample and its neighbours."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if np.all(np.isnan(ys)):
        raise FlowSaturated("no finite derivative samples in the window")
    k = int(np.nanargmax(ys))
    if 0 < k < len(xs) - 1 and np.all(np.isfinite(ys[k - 1:k + 2])):
        a, b, c = np.polyfit(xs[k - 1:k + 2] - xs[k], ys[k - 1:k + 2], 2)
        if a < 0:
            dx = -b / (2 * a)
            return float(xs[k] + dx), float(c - b * b / (4 * a))
    return float(xs[k]), float(ys[k])


def _extrema(model: str, n_steps: int, window, points: int) -> dict[str, tuple[float, float]]:
    lo, hi = window
    xs = np.linspace(lo, hi, points)
    d_coll, d_local = derivative_profile(model, xs, n_steps)
    return {
        COLLECTIVE: refine_peak(xs, np.abs(d_coll)),
        LOCAL: refine_peak(xs, np.abs(d_local)),
    }


def locate_extremum(model: str, which: str, n_steps: int, window=DEFAULT_WINDOW,
                    points: int = DEFAULT_POINTS) -> tuple[float, float]:
    """Position and height of the peak of ``|dC/dx|`` on ``window`` at depth ``n_steps``."""
    if which not in (COLLECTIVE, LOCAL):
        raise InvalidParam(f"which must be {COLLECTIVE!r} or {LOCAL!r}")
    return _extrema(model, n_steps, window, points)[which]


def fit_loglog(ln_n: Sequence[float], ln_deriv: Sequence[float]) -> tuple[float, float, float]:
    """Ordinary least squares; returns ``(slope, intercept, r_squared)``."""
    res = linregress(np.asarray(ln_n, dtype=float), np.asarray(ln_deriv, dtype=float))
    return float(res.slope), float(res.intercept), float(min(1.0, res.rvalue**2))


def scaling_fits(model: str, n_range: Sequence[int] = DEFAULT_DEPTHS, window=DEFAULT_WINDOW,
                 points: int = DEFAULT_POINTS) -> dict[str, ScalingFit]:
    """Finite-size scaling of both derivative peaks, sharing one derivative profile per depth."""
    depths = tuple(int(n) for n in n_range)
    if len(depths) < 3:
        raise InvalidParam("a scaling fit needs at least three depths")
    b = BLOCK_SIZE[model]
    peaks = {COLLECTIVE: [], LOCAL: []}
    for n in depths:
        for which, peak in _extrema(model, n, window, points).items():
            peaks[which].append(peak)
    ln_n = [(n + 1) * math.log(b) for n in depths]
    fits = {}
    for which, found in peaks.items():
        ln_d = [math.log(height) for _, height in found]
        slope, intercept, r2 = fit_loglog(ln_n, ln_d)
        fits[which] = ScalingFit(
            points=tuple(zip(ln_n, ln_d)),
            theta=slope,
            intercept=intercept,
            r_squared=r2,
            depths=depths,
            x_stars=tuple(x for x, _ in found),
        )
    return fits


def scaling_fit(model: str, which: str, n_range: Sequence[int] = DEFAULT_DEPTHS, window=DEFAULT_WINDOW,
                points: int = DEFAULT_POINTS) -> ScalingFit:
    if which not in (COLLECTIVE, LOCAL):
        raise InvalidParam(f"which must be {COLLECTIVE!r} or {LOCAL!r}")
    return scaling_fits(model, n_range, window, points)[which]
