"""Exact dense state-vector simulation for small registers of qudits."""

from .gates import (
    CNOT,
    LEFT_SHIFT,
    RIGHT_SHIFT,
    ControlKind,
    ControlledGateSpec,
    Gate,
    apply_controlled,
    apply_single,
    basis_change,
    hadamard_gate,
    identity_gate,
    pauli_x,
    power_of,
    rotation_gate,
    shift_gate,
)
from .kernels import BACKEND
from .state import (
    DimensionError,
    LayoutError,
    MeasurementRecord,
    NumericalError,
    StateVector,
    SubsystemLayout,
    basis_state,
    bell_state,
    discard,
    extend,
    fidelity,
    ghz_state,
    measure_z,
    partial_trace_rank,
    product,
    reduced_density_matrix,
    reorder,
)

__all__ = [
    "BACKEND",
    "CNOT",
    "LEFT_SHIFT",
    "RIGHT_SHIFT",
    "ControlKind",
    "ControlledGateSpec",
    "DimensionError",
    "Gate",
    "LayoutError",
    "MeasurementRecord",
    "NumericalError",
    "StateVector",
    "SubsystemLayout",
    "apply_controlled",
    "apply_single",
    "basis_change",
    "basis_state",
    "bell_state",
    "discard",
    "extend",
    "fidelity",
    "ghz_state",
    "hadamard_gate",
    "identity_gate",
    "measure_z",
    "partial_trace_rank",
    "pauli_x",
    "power_of",
    "product",
    "reduced_density_matrix",
    "reorder",
    "rotation_gate",
    "shift_gate",
]
