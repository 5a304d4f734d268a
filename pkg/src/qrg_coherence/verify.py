"""Self-check suites run by ``qrg-coherence verify``.

Each suite returns a :class:`SuiteResult` made of named checks, every check
carrying the worst residual it saw and the tolerance it was held to.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .analysis import derivative_profile
from .coherence import coherence_arrays, coherence_distance, coherence_triple, qjsd
from .linalg import _jacobi, kron
from .models import (
    DM,
    ITF,
    block_ground_state,
    dm_block_hamiltonian,
    dm_flow_step,
    dm_ground_state,
    dm_q,
    iterate_flow,
    itf_block_hamiltonian,
    itf_flow_step,
    itf_ground_state,
)
from .sampling import random_density_matrices, random_unitaries

DEFAULT_SEED = 20190601
METRIC_SAMPLES = 1000
# chain rule is only compared where the effective coupling stays resolvable
WELL_CONDITIONED = (1e-3, 1e3)


@dataclass
class Check:
    name: str
    worst: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.worst <= self.tolerance)


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def worst_residual(self) -> float:
        return max(c.worst for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "worst_residual": self.worst_residual,
            "checks": [dict(asdict(c), passed=c.passed) for c in self.checks],
        }


def metric_axioms(rng: np.random.Generator, samples: int = METRIC_SAMPLES) -> SuiteResult:
    out = SuiteResult("metric_axioms")
    sym = ident = tri = rng_excess = 0.0
    smallest_distinct = np.inf
    for dim in (2, 4, 8):
        rho, sigma, tau = (random_density_matrices(rng, dim, samples) for _ in range(3))
        d_rs = coherence_distance(rho, sigma)
        d_sr = coherence_distance(sigma, rho)
        d_st = coherence_distance(sigma, tau)
        d_rt = coherence_distance(rho, tau)
        sym = max(sym, float(np.max(np.abs(d_rs - d_sr))))
        ident = max(ident, float(np.max(coherence_distance(rho, rho))))
        tri = max(tri, float(np.max(d_rt - d_rs - d_st)))
        t = qjsd(rho, sigma)
        rng_excess = max(rng_excess, float(np.max(np.maximum(-t, t - 1.0))))
        smallest_distinct = min(smallest_distinct, float(np.min(d_rs)))
    out.checks += [
        Check("symmetry", sym, 1e-12),
        Check("identity", ident, 1e-7),
        Check("distinct_positive", 0.0 if smallest_distinct > 0 else 1.0, 0.0),
        Check("triangle", max(tri, 0.0), 1e-9),
        Check("range", max(rng_excess, 0.0), 0.0),
    ]
    return out


def local_unitary_invariance(rng: np.random.Generator, samples: int = 200) -> SuiteResult:
    out = SuiteResult("local_unitary_invariance")
    for sites in (2, 3):
        dim = 2**sites
        rho = random_density_matrices(rng, dim, samples)
        u = random_unitaries(rng, 2, samples)
        for _ in range(sites - 1):
            u = kron(u, random_unitaries(rng, 2, samples))
        rotated = u @ rho @ np.swapaxes(u.conj(), -1, -2)
        before = np.stack(coherence_arrays(rho))
        after = np.stack(coherence_arrays(rotated))
        out.checks.append(Check(f"{sites}_sites", float(np.max(np.abs(before - after))), 1e-9))
    return out


def tradeoff(rng: np.random.Generator, samples: int = 500) -> SuiteResult:
    out = SuiteResult("tradeoff")
    for sites in (2, 3):
        total, local, collective = coherence_arrays(random_density_matrices(rng, 2**sites, samples))
        out.checks.append(Check(f"{sites}_sites", max(0.0, float(np.max(total - local - collective))), 1e-9))
    xs = np.linspace(0.05, 4.0, 50)
    for model in (ITF, DM):
        excess = 0.0
        for x in xs:
            c = coherence_triple(block_ground_state(model, float(x)).density_matrix())
            excess = max(excess, c.total - c.local - c.collective)
        out.checks.append(Check(f"{model}_block_states", max(0.0, excess), 1e-9))
    return out


def _oracle_residuals(h: np.ndarray, states: list[np.ndarray], energy: float) -> tuple[float, float, float]:
    w, _ = _jacobi(h)
    ground = w[-1]
    residual = max(float(np.linalg.norm(h @ s - ground * s)) for s in states)
    return residual, abs(w[-1] - w[-2]), abs(energy - ground)


def hamiltonian_oracles(points: int = 50) -> SuiteResult:
    out = SuiteResult("hamiltonian_oracles")
    worst = {ITF: [0.0, 0.0, 0.0], DM: [0.0, 0.0, 0.0]}
    for g in np.linspace(0.0, 5.0, points):
        states = [itf_ground_state(g, k).amplitudes for k in (0, 1)]
        r = _oracle_residuals(itf_block_hamiltonian(1.0, g), states, -np.sqrt(1 + g * g))
        worst[ITF] = [max(a, b) for a, b in zip(worst[ITF], r)]
    for D in np.linspace(0.05, 5.0, points):
        states = [dm_ground_state(D, k).amplitudes for k in (0, 1)]
        r = _oracle_residuals(dm_block_hamiltonian(1.0, D), states, -(1 + dm_q(D)) / 4)
        worst[DM] = [max(a, b) for a, b in zip(worst[DM], r)]
    for model, (res, degen, energy) in worst.items():
        out.checks += [
            Check(f"{model}_eigen_residual", res, 1e-10),
            Check(f"{model}_degeneracy", degen, 1e-10),
            Check(f"{model}_ground_energy", energy, 1e-10),
        ]
    return out


def flow_fixed_points(q_of: Callable = dm_q) -> SuiteResult:
    out = SuiteResult("flow_fixed_points")
    h = 1e-5
    out.checks += [
        Check("itf_fixed_point", abs(float(itf_flow_step(1.0)[0]) - 1.0), 1e-12),
        Check("dm_fixed_point", abs(float(dm_flow_step(1.0, q_of)[0]) - 1.0), 1e-12),
        Check(
            "itf_linearized_slope",
            abs((itf_flow_step(1 + h)[0] - itf_flow_step(1 - h)[0]) / (2 * h) - 2.0),
            1e-6,
        ),
        Check(
            "dm_linearized_slope",
            abs((dm_flow_step(1 + h, q_of)[0] - dm_flow_step(1 - h, q_of)[0]) / (2 * h) - 5.0 / 3.0),
            1e-6,
        ),
    ]
    return out


def direct_derivative(model: str, x: float, n_steps: int, rel_step: float = 5e-4) -> np.ndarray | None:
    """``(dC_collective/dx, dC_local/dx)`` by differencing the composed map C(f^n(x)).

    Five-point stencil on scalar trajectories; independent of the chain-rule
    path. Returns None when any stencil point freezes.
    """
    h = rel_step * x
    values = []
    for k in (2, 1, -1, -2):
        traj = iterate_flow(model, x + k * h, n_steps)
        if traj.frozen:
            return None
        c = coherence_triple(block_ground_state(model, traj.final).density_matrix())
        values.append(np.array([c.collective, c.local]))
    return (-values[0] + 8 * values[1] - 8 * values[2] + values[3]) / (12 * h)


def chain_rule_grid() -> list[float]:
    xs = np.linspace(0.5, 1.5, 21)
    return [float(x) for x in xs if abs(x - 1.0) >= 0.05 - 1e-12]


def chain_rule_agreement(max_depth: int = 4) -> SuiteResult:
    out = SuiteResult("chain_rule_agreement")
    lo, hi = WELL_CONDITIONED
    for model in (ITF, DM):
        worst = 0.0
        xs = chain_rule_grid()
        for n in range(max_depth + 1):
            d_coll, d_local = derivative_profile(model, xs, n)
            for x, dc, dl in zip(xs, d_coll, d_local):
                if not lo <= iterate_flow(model, x, n).final <= hi:
                    continue
                ref = direct_derivative(model, x, n)
                rel = max(abs(ref[0] - dc) / abs(ref[0]), abs(ref[1] - dl) / abs(ref[1]))
                worst = max(worst, float(rel))
        out.checks.append(Check(f"{model}_relative_error", worst, 1e-5))
    return out


def run_all(seed: int = DEFAULT_SEED, q_of: Callable = dm_q, metric_samples: int = METRIC_SAMPLES) -> dict:
    rng = np.random.default_rng(seed)
    suites = [
        metric_axioms(rng, metric_samples),
        local_unitary_invariance(rng),
        tradeoff(rng),
        hamiltonian_oracles(),
        flow_fixed_points(q_of),
        chain_rule_agreement(),
    ]
    return {
        "seed": seed,
        "passed": all(s.passed for s in suites),
        "suites": [s.to_dict() for s in suites],
    }
