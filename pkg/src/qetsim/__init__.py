"""Exact, seedable simulator and estimators for a minimal two-qubit
energy teleportation protocol."""

from .analysis import (
    ComparisonRow,
    PhiScanResult,
    SweepGrid,
    comparison_report,
    default_grid,
    evolution_scan,
    heatmap,
    mitigated_run,
    phi_scan,
    sampled_calibration_matrix,
)
from .model import (
    GRID_H,
    GRID_K,
    REPORT_PAIRS,
    EntropyReport,
    HamiltonianSet,
    ModelParams,
    ProtocolAngles,
    analytic_E0,
    analytic_E1,
    analytic_H1,
    analytic_V,
    angles,
    build_hamiltonians,
    entropy_report,
    free_evolution_H1,
    free_evolution_V,
    ground_state,
    nogo_gap,
    rho_measured,
    rho_qet,
)
from .noise import (
    MITIGATION_METHODS,
    PRESETS,
    ReadoutNoise,
    apply_noise,
    build_calibration_circuits,
    confusion_matrix,
    estimate_calibration_matrix,
    measurement_fidelity,
    mitigate,
    noisy_distribution,
)
from .protocol import (
    EstimationResult,
    Mode,
    Target,
    build_circuit,
    combine_E1,
    estimate_X0X1,
    estimate_Z1,
    estimate_energy,
    run_protocol,
    run_protocol_E1,
)
from .simcore import (
    BITSTRINGS,
    Circuit,
    ClassicallyControlledRy,
    Cnot,
    ControlledRy,
    Hadamard,
    MeasureZ,
    NumericalError,
    PauliX,
    Ry,
    apply_gate,
    depth,
    evolve,
    exact_distribution,
    expectation,
    gate_unitary,
    make_rng,
    measure_z,
    run_shots,
    state_00,
)

__version__ = "0.1.0"

__all__ = [
    "BITSTRINGS",
    "Circuit",
    "ClassicallyControlledRy",
    "Cnot",
    "ComparisonRow",
    "ControlledRy",
    "EntropyReport",
    "EstimationResult",
    "GRID_H",
    "GRID_K",
    "Hadamard",
    "HamiltonianSet",
    "MITIGATION_METHODS",
    "MeasureZ",
    "Mode",
    "ModelParams",
    "NumericalError",
    "PRESETS",
    "PauliX",
    "PhiScanResult",
    "ProtocolAngles",
    "REPORT_PAIRS",
    "ReadoutNoise",
    "Ry",
    "SweepGrid",
    "Target",
    "analytic_E0",
    "analytic_E1",
    "analytic_H1",
    "analytic_V",
    "angles",
    "apply_gate",
    "apply_noise",
    "build_calibration_circuits",
    "build_circuit",
    "build_hamiltonians",
    "combine_E1",
    "comparison_report",
    "confusion_matrix",
    "default_grid",
    "depth",
    "entropy_report",
    "estimate_X0X1",
    "estimate_Z1",
    "estimate_calibration_matrix",
    "estimate_energy",
    "evolution_scan",
    "evolve",
    "exact_distribution",
    "expectation",
    "free_evolution_H1",
    "free_evolution_V",
    "gate_unitary",
    "ground_state",
    "heatmap",
    "make_rng",
    "measure_z",
    "measurement_fidelity",
    "mitigate",
    "mitigated_run",
    "nogo_gap",
    "noisy_distribution",
    "phi_scan",
    "rho_measured",
    "rho_qet",
    "run_protocol",
    "run_protocol_E1",
    "run_shots",
    "sampled_calibration_matrix",
    "state_00",
]
