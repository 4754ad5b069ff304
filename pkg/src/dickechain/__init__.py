"""Simulator for the macroscopic-entanglement repeater protocol on
chains of collective-spin ensembles: exact small-scale evolution,
window-truncated closed-form amplitudes up to N = 10^6, entanglement
metrics, and collective S_z dephasing."""

__version__ = "0.1.0"

from .chain import (
    BipartiteAmplitudes,
    ChainConfig,
    chain_config,
    closed_form_amplitudes,
    exact_evolve,
    phase_reduced_core,
    project_intermediates,
    time_grid,
)
from .dephasing import (
    MAGIC_TIMES,
    DephasingParams,
    dephased_end_to_end,
    lindblad_element_propagator,
    magic_time_scan,
    rk4_lindblad,
)
from .dicke import (
    CoherentParams,
    TruncationWindow,
    coherent_dicke_amplitudes,
    coherent_x_overlap,
    log_binomial,
    make_window,
    x_overlap,
    x_overlap_matrix,
    x_overlap_row,
)
from .entanglement import (
    EntanglementReport,
    log_negativity,
    reduced_density,
    schmidt_entropy,
    von_neumann_from_density,
)
from .errors import (
    CapacityError,
    ConfigError,
    ImpossibleOutcomeError,
    OutputError,
    SimulationError,
    ValidityError,
)
