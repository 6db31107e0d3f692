"""Dynamically protected single-qubit gates under dephasing noise.

Compile composite-pulse gates embedded in dynamical decoupling sequences,
simulate them against calibrated classical and quantum dephasing models,
and score them by process tomography.
"""

from .compiler import (
    DD_KINDS,
    KDD,
    PDD,
    XY4,
    XY8,
    CompileError,
    DDKind,
    PulseEvent,
    RotationSpec,
    Schedule,
    apply_amplitude_error,
    bb1_expand,
    dd_cycle,
    decompose_gate,
    gate_target,
    hard_pulse_schedule,
    protected_bb1_gate,
    protected_rotation,
    pulse_count,
    schedule_from_json,
    schedule_to_json,
    verify_schedule,
)
from .core import rotation_unitary
from .harness import (
    ConfigError,
    ExperimentConfig,
    ResultRow,
    build_schedule,
    emit_report,
    load_config,
    resolve_noise,
    run_calibration,
    run_sweep,
    run_table1,
    simulate_cell,
)
from .noise import (
    CalibrationError,
    CalibrationResult,
    OUNoiseSpec,
    SpinBathSpec,
    calibrate_to_targets,
    default_spin_bath,
    fid_decay_curve,
    hahn_decay_curve,
)
from .simulate import bath_propagator, ideal_propagator, ou_propagators
from .tomography import (
    ChannelSamples,
    ChiMatrix,
    chi_reconstruct,
    gate_fidelity,
    process_fidelity,
)

__version__ = "0.1.0"

__all__ = [
    "CalibrationError",
    "CalibrationResult",
    "ChannelSamples",
    "ChiMatrix",
    "CompileError",
    "ConfigError",
    "DDKind",
    "DD_KINDS",
    "ExperimentConfig",
    "KDD",
    "OUNoiseSpec",
    "PDD",
    "PulseEvent",
    "ResultRow",
    "RotationSpec",
    "Schedule",
    "SpinBathSpec",
    "XY4",
    "XY8",
    "apply_amplitude_error",
    "bath_propagator",
    "bb1_expand",
    "build_schedule",
    "calibrate_to_targets",
    "chi_reconstruct",
    "dd_cycle",
    "decompose_gate",
    "default_spin_bath",
    "emit_report",
    "fid_decay_curve",
    "gate_fidelity",
    "gate_target",
    "hahn_decay_curve",
    "hard_pulse_schedule",
    "ideal_propagator",
    "load_config",
    "ou_propagators",
    "process_fidelity",
    "protected_bb1_gate",
    "protected_rotation",
    "pulse_count",
    "resolve_noise",
    "rotation_unitary",
    "run_calibration",
    "run_sweep",
    "run_table1",
    "schedule_from_json",
    "schedule_to_json",
    "simulate_cell",
    "verify_schedule",
]
