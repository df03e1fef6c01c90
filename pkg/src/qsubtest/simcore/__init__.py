"""Dense state-vector simulator: gates, controlled gates, measurement, oracles."""

from . import _backend
from .gates import GATE_INFO, Gate, gate_matrix
from .state import (
    AMP_TOL,
    MAX_QUBITS,
    NORM_TOL,
    MeasurementOutcome,
    StateVector,
    apply_controlled,
    apply_gate,
    bits_to_int,
    dump_amplitudes,
    exact_distribution,
    fidelity_with,
    int_to_bits,
    load_amplitudes,
    measure,
    new_state,
    sample_counts,
)


def backend_name() -> str:
    """Name of the kernel implementation in use ("cython" or "python")."""
    return _backend.BACKEND


use_backend = _backend.use_backend

__all__ = [
    "AMP_TOL",
    "GATE_INFO",
    "Gate",
    "MAX_QUBITS",
    "MeasurementOutcome",
    "NORM_TOL",
    "StateVector",
    "apply_controlled",
    "apply_gate",
    "backend_name",
    "bits_to_int",
    "dump_amplitudes",
    "exact_distribution",
    "fidelity_with",
    "gate_matrix",
    "int_to_bits",
    "load_amplitudes",
    "measure",
    "new_state",
    "sample_counts",
    "use_backend",
]
