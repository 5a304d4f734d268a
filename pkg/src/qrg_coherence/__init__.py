"""Basis-independent quantum coherence of renormalized Ising block ground states."""

from .analysis import (
    DerivativeRecord,
    ScalingFit,
    SweepRecord,
    derivative_along_flow,
    locate_extremum,
    scaling_fit,
    scaling_fits,
    sweep,
)
from .coherence import (
    CoherenceTriple,
    MonogamyReport,
    coherence_distance,
    coherence_triple,
    collective_coherence,
    cut_coherence,
    local_coherence,
    monogamy,
    product_of_marginals,
    qjsd,
    total_coherence,
    tripartite_bound_check,
)
from .linalg import (
    DensityMatrix,
    PureState,
    Spectrum,
    basis_state,
    hermitian_eig,
    partial_trace,
    tensor_product,
    von_neumann_entropy,
)
from .models import (
    FlowTrajectory,
    dm_block_hamiltonian,
    dm_flow_derivative,
    dm_flow_step,
    dm_ground_state,
    find_fixed_point,
    iterate_flow,
    itf_block_hamiltonian,
    itf_flow_step,
    itf_ground_state,
)

__version__ = "0.1.0"
