"""Desk-scale simulator and verification toolkit for measurement-driven
dynamical decoupling: noise channels, pulse schedules, optimality checks,
idle-aware circuit scheduling, and a sampled-subspace diagonalization
pipeline with configuration recovery."""

from .states import (
    BlochVector,
    DensityMatrix,
    PureState,
    SingleQubitUnitary,
    bloch_vector,
    density_from_bloch,
    entanglement_fidelity,
    fidelity,
    haar_random_state,
    haar_random_unitary,
    reduced_density,
)
from .noise import (
    JumpOperator,
    KrausChannel,
    NoiseParams,
    SpectralDensity,
    apply_local,
    chi_integral,
    combined_channel,
    dephasing_channel_from_chi,
    filter_function,
    lindblad_derivative,
    relaxation_dephasing_jumps,
)
from .sequences import (
    PauliExpectations,
    PulseSchedule,
    build_schedule,
    evolve_with_schedule,
    measure_expectations,
    mdd_unitary,
    qdd_times,
    toggling_frames,
    udd_times,
)
from .analysis import (
    AnsatzCoefficients,
    DecayRates,
    QuadraticFidelity,
    TwoQubitRates,
    c3_section_feasible,
    classify_case,
    dd_entanglement_fidelity,
    decay_rate,
    decay_rate_quadratic,
    first_order_gap,
    first_order_residual,
    gate_error_delta,
    grid_minimum_two_qubit,
    lemma_check,
    local_entanglement_fidelity,
    mixed_state_bounds,
    multi_dd_fidelity,
    multi_subsystem_bound_check,
    optimize_two_qubit_mdd,
    quadratic_f,
    two_qubit_decay_rate,
)
from .circuits import (
    Gate,
    GateDurations,
    IdleInterval,
    ScheduledCircuit,
    Slice,
    circuit_unitary,
    identify_idle,
    insert_dd,
    qft_circuit,
    qft_success_probability,
    qft_success_scenario,
    sample_counts,
    simulate,
    success_probability,
)
from .experiments import ExperimentConfig, colored_noise_fidelity, run
from . import sqd

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
